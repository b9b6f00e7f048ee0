//! Experiment harness: CA-vs-RS evaluation, (alpha, beta) sweeps, limit
//! bounds and the randomized-output control, averaged over seeded shuffles.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::baselines::{derive_seed, randomize_outputs, split, Predictor, PredictorKind, SplitSpec};
use crate::distribution::{ContextProjection, DistributionTable, ProbabilitySource, Sample, UnseenPolicy};
use crate::error::{Error, Result};
use crate::io::{case_histogram, load_dataset, load_predictions, Dataset, DatasetOptions, EvaluationReport};
use crate::metric::{
    accuracy_of, mean, relevance_score_with, rs_limit_alpha, rs_limit_beta, score_sample, OutcomeLabel, RsParams,
    SampleEvaluation,
};

/// Placeholder in prediction-file paths replaced by the shuffle index.
pub const SHUFFLE_PLACEHOLDER: &str = "{shuffle}";

/// Weight used to approximate the limit bounds numerically.
pub const LIMIT_PROBE_WEIGHT: f64 = 1e6;

/// Largest accepted gap between a probed RS and its limit bound.
pub const LIMIT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    Baseline(PredictorKind),
    /// Externally produced predictions, indexed by evaluation-split row.
    Predictions(PathBuf),
}

impl ModelSpec {
    pub fn name(&self) -> String {
        match self {
            ModelSpec::Baseline(kind) => kind.name().to_string(),
            ModelSpec::Predictions(path) => path
                .file_stem()
                .map(|s| {
                    s.to_string_lossy()
                        .replace(SHUFFLE_PLACEHOLDER, "")
                        .trim_matches(['-', '_', '.'])
                        .to_string()
                })
                .unwrap_or_else(|| path.display().to_string()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dataset: PathBuf,
    /// Fixed evaluation rows; disables shuffling when set.
    pub test_dataset: Option<PathBuf>,
    pub dataset_options: DatasetOptions,
    pub excluded: Vec<String>,
    pub prob_source: ProbabilitySource,
    pub unseen: UnseenPolicy,
    pub split: SplitSpec,
    pub params: RsParams,
    pub models: Vec<ModelSpec>,
    pub include_samples: bool,
}

impl RunConfig {
    pub fn new(dataset: impl Into<PathBuf>) -> Self {
        RunConfig {
            dataset: dataset.into(),
            test_dataset: None,
            dataset_options: DatasetOptions::default(),
            excluded: Vec::new(),
            prob_source: ProbabilitySource::Full,
            unseen: UnseenPolicy::Uniform,
            split: SplitSpec::default(),
            params: RsParams::default(),
            models: Vec::new(),
            include_samples: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::Config("specify at least one baseline or prediction file".into()));
        }
        if self.test_dataset.is_none() {
            self.split.validate()?;
        }
        Ok(())
    }
}

/// Evaluations of one model, one list per shuffle.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub name: String,
    pub folds: Vec<Vec<SampleEvaluation>>,
}

impl ModelRun {
    fn over_folds(&self, f: impl Fn(&[SampleEvaluation]) -> Result<f64>) -> Result<f64> {
        let values = self.folds.iter().map(|fold| f(fold)).collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::EmptyInput("model run has no shuffles"));
        }
        Ok(mean(values))
    }

    /// Mean over shuffles of the per-shuffle RS.
    pub fn rs(&self, params: &RsParams) -> Result<f64> {
        self.over_folds(|fold| relevance_score_with(fold, params))
    }

    pub fn ca(&self) -> Result<f64> {
        self.over_folds(accuracy_of)
    }

    pub fn rs_alpha_inf(&self) -> Result<f64> {
        self.over_folds(rs_limit_alpha)
    }

    pub fn rs_beta_inf(&self) -> Result<f64> {
        self.over_folds(rs_limit_beta)
    }

    pub fn samples(&self) -> impl Iterator<Item = &SampleEvaluation> {
        self.folds.iter().flatten()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub model: String,
    pub ca: f64,
    pub rs: f64,
    pub rs_alpha_inf: f64,
    pub rs_beta_inf: f64,
}

#[derive(Debug, Clone)]
pub struct EvaluateOutput {
    pub reports: Vec<(String, EvaluationReport)>,
}

impl EvaluateOutput {
    pub fn comparison(&self) -> Vec<ComparisonRow> {
        self.reports
            .iter()
            .map(|(model, r)| ComparisonRow {
                model: model.clone(),
                ca: r.ca,
                rs: r.rs,
                rs_alpha_inf: r.rs_alpha_inf,
                rs_beta_inf: r.rs_beta_inf,
            })
            .collect()
    }

    pub fn comparison_csv(&self) -> String {
        let mut out = String::from("model,ca,rs,rs_alpha_inf,rs_beta_inf\n");
        for row in self.comparison() {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{:.6},{:.6}",
                row.model, row.ca, row.rs, row.rs_alpha_inf, row.rs_beta_inf
            );
        }
        out
    }
}

/// A point of an (alpha, beta) sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepPoint {
    Finite(RsParams),
    AlphaLimit,
    BetaLimit,
}

impl SweepPoint {
    fn columns(&self) -> (String, String) {
        match self {
            SweepPoint::Finite(p) => (p.alpha().to_string(), p.beta().to_string()),
            SweepPoint::AlphaLimit => ("inf".into(), "1".into()),
            SweepPoint::BetaLimit => ("1".into(), "inf".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub pairs: Vec<RsParams>,
    pub include_limits: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            pairs: [(1.0, 2.0), (1.0, 1.0), (2.0, 1.0)]
                .iter()
                .map(|&(a, b)| RsParams::new(a, b).expect("valid default pair"))
                .collect(),
            include_limits: false,
        }
    }
}

impl SweepSpec {
    /// Parses `"2:1,1:1,1:2"`.
    pub fn parse_pairs(text: &str) -> Result<Vec<RsParams>> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("pair `{item}` is not alpha:beta")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("pair `{item}`: `{s}` is not a number")))
            };
            pairs.push(RsParams::new(num(a)?, num(b)?)?);
        }
        if pairs.is_empty() {
            return Err(Error::Config("empty sweep".into()));
        }
        Ok(pairs)
    }

    fn points(&self) -> Vec<SweepPoint> {
        let mut points: Vec<SweepPoint> = self.pairs.iter().copied().map(SweepPoint::Finite).collect();
        if self.include_limits {
            points.push(SweepPoint::AlphaLimit);
            points.push(SweepPoint::BetaLimit);
        }
        points
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: String,
    pub point: SweepPoint,
    pub rs: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("model,alpha,beta,rs\n");
    for row in rows {
        let (a, b) = row.point.columns();
        let _ = writeln!(out, "{},{a},{b},{:.6}", row.model, row.rs);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub model: String,
    pub rs_alpha_inf: f64,
    pub rs_beta_inf: f64,
    /// RS at `(1e6, 1)`.
    pub rs_alpha_probe: f64,
    /// RS at `(1, 1e6)`.
    pub rs_beta_probe: f64,
}

impl BoundsRow {
    pub fn converged(&self) -> bool {
        (self.rs_alpha_probe - self.rs_alpha_inf).abs() <= LIMIT_TOLERANCE
            && (self.rs_beta_probe - self.rs_beta_inf).abs() <= LIMIT_TOLERANCE
    }
}

pub fn bounds_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from("model,rs_alpha_inf,rs_beta_inf,rs_alpha_1e6,rs_beta_1e6\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6}",
            r.model, r.rs_alpha_inf, r.rs_beta_inf, r.rs_alpha_probe, r.rs_beta_probe
        );
    }
    out
}

/// CA of the randomized arm against the chance level `100 / K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChanceCheck {
    pub model: String,
    pub ca: f64,
    pub rs: f64,
    pub expected_ca: f64,
    /// Binomial standard error of CA over all evaluated rows, in percent.
    pub standard_error: f64,
}

impl ChanceCheck {
    pub fn within(&self, standard_errors: f64) -> bool {
        (self.ca - self.expected_ca).abs() <= standard_errors * self.standard_error
    }
}

#[derive(Debug, Clone)]
pub struct RandomControl {
    pub real: EvaluateOutput,
    pub randomized: EvaluateOutput,
    pub alphabet_size: usize,
    pub checks: Vec<ChanceCheck>,
}

/// One evaluation partition.
struct Fold {
    train: Vec<Sample>,
    test: Vec<Sample>,
    seed: u64,
}

/// A loaded dataset bound to a run configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: RunConfig,
    data: Dataset,
    test: Option<Dataset>,
    projection: ContextProjection,
}

impl Experiment {
    pub fn load(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let data = load_dataset(&config.dataset, &config.dataset_options)?;
        let test = match &config.test_dataset {
            Some(path) => Some(load_dataset(path, &config.dataset_options)?),
            None => None,
        };
        Experiment::new(config, data, test)
    }

    pub fn new(config: RunConfig, data: Dataset, test: Option<Dataset>) -> Result<Self> {
        config.validate()?;
        let projection = ContextProjection::new(&data.schema, &config.excluded)?;
        if let Some(test) = &test {
            if test.schema.features() != data.schema.features() {
                return Err(Error::Config("test dataset header differs from the dataset header".into()));
            }
        }
        Ok(Experiment {
            config,
            data,
            test,
            projection,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    /// Alphabet of the whole experiment: declared plus observed labels.
    pub fn alphabet(&self) -> Vec<OutcomeLabel> {
        let mut labels = self.data.schema.declared_labels().clone();
        labels.extend(self.data.samples.iter().map(|s| s.outcome.clone()));
        if let Some(test) = &self.test {
            labels.extend(test.samples.iter().map(|s| s.outcome.clone()));
        }
        labels.into_iter().collect()
    }

    fn folds(&self, data: &[Sample], test: Option<&[Sample]>) -> Result<Vec<Fold>> {
        let root = self.config.split.seed;
        if let Some(test) = test {
            return Ok(vec![Fold {
                train: data.to_vec(),
                test: test.to_vec(),
                seed: derive_seed(root, "fold", 0),
            }]);
        }
        (0..self.config.split.shuffle_count)
            .map(|i| {
                let s = split(data.len(), &self.config.split, i)?;
                Ok(Fold {
                    train: s.train_samples(data),
                    test: s.test_samples(data),
                    seed: derive_seed(root, "fold", i as u64),
                })
            })
            .collect()
    }

    fn table(&self, rows: &[Sample]) -> Result<DistributionTable> {
        DistributionTable::build_with(rows, self.projection.clone(), &self.data.schema, self.config.prob_source)
    }

    fn predictions(&self, model: &ModelSpec, fold: &Fold, index: usize, folds: usize) -> Result<Vec<OutcomeLabel>> {
        match model {
            ModelSpec::Baseline(kind) => {
                let mut predictor = Predictor::fit(*kind, &fold.train, &self.projection, &self.data.schema, fold.seed)?;
                predictor.predict(&fold.test)
            }
            ModelSpec::Predictions(path) => {
                let text = path.to_string_lossy();
                let resolved = if text.contains(SHUFFLE_PLACEHOLDER) {
                    PathBuf::from(text.replace(SHUFFLE_PLACEHOLDER, &index.to_string()))
                } else if folds == 1 {
                    path.clone()
                } else {
                    return Err(Error::Config(format!(
                        "{}: {folds} shuffles need one prediction file each; put `{SHUFFLE_PLACEHOLDER}` in the path",
                        path.display()
                    )));
                };
                Ok(load_predictions(&resolved, fold.test.len())?.predicted)
            }
        }
    }

    /// Scores every model on every fold of `data` (optionally against fixed
    /// `test` rows).
    fn run_models(&self, data: &[Sample], test: Option<&[Sample]>) -> Result<Vec<ModelRun>> {
        let folds = self.folds(data, test)?;
        let full_table = match self.config.prob_source {
            ProbabilitySource::Full => {
                let mut all = data.to_vec();
                all.extend(test.into_iter().flatten().cloned());
                Some(self.table(&all)?)
            }
            ProbabilitySource::Train => None,
        };
        let mut runs: Vec<ModelRun> = self
            .config
            .models
            .iter()
            .map(|m| ModelRun {
                name: m.name(),
                folds: Vec::new(),
            })
            .collect();
        for (index, fold) in folds.iter().enumerate() {
            let train_table;
            let table = match &full_table {
                Some(t) => t,
                None => {
                    train_table = self.table(&fold.train)?;
                    &train_table
                }
            };
            for (model, run) in self.config.models.iter().zip(runs.iter_mut()) {
                let scored = self
                    .predictions(model, fold, index, folds.len())
                    .and_then(|predicted| {
                        predicted
                            .iter()
                            .zip(&fold.test)
                            .map(|(p, row)| {
                                let dist = table.lookup_sample(row, self.config.unseen)?;
                                Ok(score_sample(p, &row.outcome, dist, &self.config.params))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .map_err(|e| e.in_model(&run.name))?;
                run.folds.push(scored);
            }
        }
        Ok(runs)
    }

    pub fn model_runs(&self) -> Result<Vec<ModelRun>> {
        self.run_models(&self.data.samples, self.test.as_ref().map(|t| t.samples.as_slice()))
    }

    fn provenance(&self, model: &str, arm: &str) -> BTreeMap<String, String> {
        let c = &self.config;
        let mut p = BTreeMap::new();
        p.insert("model".into(), model.to_string());
        p.insert("arm".into(), arm.to_string());
        p.insert("dataset_sha256".into(), self.data.digest.clone());
        p.insert("excluded".into(), c.excluded.join(","));
        p.insert("probability_source".into(), c.prob_source.as_str().to_string());
        p.insert("unseen_policy".into(), c.unseen.as_str().to_string());
        match &self.test {
            Some(test) => {
                p.insert("test_dataset_sha256".into(), test.digest.clone());
                p.insert("shuffles".into(), "1".into());
            }
            None => {
                p.insert("split_seed".into(), c.split.seed.to_string());
                p.insert("shuffles".into(), c.split.shuffle_count.to_string());
                p.insert("train_fraction".into(), c.split.train_fraction.to_string());
            }
        }
        p
    }

    fn report(&self, run: &ModelRun, arm: &str) -> Result<EvaluationReport> {
        let params = &self.config.params;
        let mut provenance = self.provenance(&run.name, arm);
        provenance.insert("evaluated_samples".into(), run.samples().count().to_string());
        let report = EvaluationReport {
            ca: run.ca()?,
            rs: run.rs(params)?,
            alpha: params.alpha(),
            beta: params.beta(),
            rs_alpha_inf: run.rs_alpha_inf()?,
            rs_beta_inf: run.rs_beta_inf()?,
            cases: case_histogram(run.samples()),
            provenance,
            samples: self.config.include_samples.then(|| run.samples().cloned().collect()),
        };
        report.validate()?;
        Ok(report)
    }

    fn reports(&self, runs: &[ModelRun], arm: &str) -> Result<EvaluateOutput> {
        let reports = runs
            .iter()
            .map(|run| Ok((run.name.clone(), self.report(run, arm)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvaluateOutput { reports })
    }

    /// CA and RS per model, averaged over shuffles.
    pub fn evaluate(&self) -> Result<EvaluateOutput> {
        self.reports(&self.model_runs()?, "real")
    }

    /// RS per model at each sweep point, reusing the per-sample distances.
    pub fn sweep(&self, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
        let runs = self.model_runs()?;
        let mut rows = Vec::new();
        for run in &runs {
            for point in spec.points() {
                let rs = match point {
                    SweepPoint::Finite(p) => run.rs(&p)?,
                    SweepPoint::AlphaLimit => run.rs_alpha_inf()?,
                    SweepPoint::BetaLimit => run.rs_beta_inf()?,
                };
                rows.push(SweepRow {
                    model: run.name.clone(),
                    point,
                    rs,
                });
            }
        }
        Ok(rows)
    }

    /// Limit bounds per model, checked against RS at very lopsided weights.
    pub fn bounds(&self) -> Result<Vec<BoundsRow>> {
        let alpha_probe = RsParams::new(LIMIT_PROBE_WEIGHT, 1.0)?;
        let beta_probe = RsParams::new(1.0, LIMIT_PROBE_WEIGHT)?;
        let mut rows = Vec::new();
        for run in self.model_runs()? {
            let row = BoundsRow {
                rs_alpha_inf: run.rs_alpha_inf()?,
                rs_beta_inf: run.rs_beta_inf()?,
                rs_alpha_probe: run.rs(&alpha_probe)?,
                rs_beta_probe: run.rs(&beta_probe)?,
                model: run.name,
            };
            if !row.converged() {
                return Err(Error::Invariant(format!(
                    "model `{}`: limit bounds ({}, {}) disagree with probes ({}, {})",
                    row.model, row.rs_alpha_inf, row.rs_beta_inf, row.rs_alpha_probe, row.rs_beta_probe
                )));
            }
            rows.push(row);
        }
        Ok(rows)
    }

    /// Evaluates the real data and a copy whose outcomes are uniform draws.
    pub fn random_control(&self) -> Result<RandomControl> {
        let alphabet = self.alphabet();
        let seed = self.config.split.seed;
        let randomized = randomize_outputs(&self.data.samples, &alphabet, derive_seed(seed, "randomize", 0));
        let randomized_test = self
            .test
            .as_ref()
            .map(|t| randomize_outputs(&t.samples, &alphabet, derive_seed(seed, "randomize", 1)));

        let real = self.evaluate()?;
        let runs = self.run_models(&randomized, randomized_test.as_deref())?;
        let randomized_out = self.reports(&runs, "randomized")?;

        let k = alphabet.len();
        let chance = 1.0 / k as f64;
        let checks = runs
            .iter()
            .zip(&randomized_out.reports)
            .map(|(run, (model, report))| {
                let n = run.samples().count() as f64;
                ChanceCheck {
                    model: model.clone(),
                    ca: report.ca,
                    rs: report.rs,
                    expected_ca: 100.0 * chance,
                    standard_error: 100.0 * (chance * (1.0 - chance) / n).sqrt(),
                }
            })
            .collect();
        Ok(RandomControl {
            real,
            randomized: randomized_out,
            alphabet_size: k,
            checks,
        })
    }
}

/// Writes `samples` as a dataset file with the given header.
pub fn write_dataset(path: &Path, features: &[String], outcome: &str, samples: &[Sample]) -> Result<()> {
    let mut text = features.join(",");
    let _ = writeln!(text, ",{outcome}");
    for s in samples {
        let _ = writeln!(text, "{},{}", s.values.join(","), s.outcome);
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
