//! Native baseline predictors, seeded train/test splitting and the
//! randomized-output transform.
//!
//! All randomness derives from one root seed: every stochastic operation
//! gets its own ChaCha stream keyed by `(seed, stream name, index)`, so adding
//! a predictor never perturbs the draws of another.

use std::collections::BTreeMap;
use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::distribution::{ContextProjection, DistributionTable, FeatureSchema, ProbabilitySource, Sample};
use crate::error::{Error, Result};
use crate::metric::OutcomeLabel;

/// Seed of the named sub-stream `index` under `root`.
pub fn derive_seed(root: u64, stream: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root.to_le_bytes());
    hasher.update((stream.len() as u64).to_le_bytes());
    hasher.update(stream.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn stream_rng(root: u64, stream: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, stream, index))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub shuffle_count: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.7,
            shuffle_count: 10,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.shuffle_count == 0 {
            return Err(Error::Config("shuffle count must be at least 1".into()));
        }
        Ok(())
    }

    /// `floor(train_fraction * rows)`; the slack absorbs representation
    /// error such as `0.29 * 100 = 28.999...`.
    pub fn train_size(&self, rows: usize) -> usize {
        (self.train_fraction * rows as f64 + 1e-9).floor() as usize
    }
}

/// Row indices of one shuffle, each side in ascending dataset order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn train_samples(&self, dataset: &[Sample]) -> Vec<Sample> {
        self.train.iter().map(|&i| dataset[i].clone()).collect()
    }

    pub fn test_samples(&self, dataset: &[Sample]) -> Vec<Sample> {
        self.test.iter().map(|&i| dataset[i].clone()).collect()
    }
}

/// Deterministic shuffled partition for `shuffle_index`.
pub fn split(rows: usize, spec: &SplitSpec, shuffle_index: usize) -> Result<Split> {
    spec.validate()?;
    if shuffle_index >= spec.shuffle_count {
        return Err(Error::Config(format!(
            "shuffle index {shuffle_index} out of range 0..{}",
            spec.shuffle_count
        )));
    }
    let n_train = spec.train_size(rows);
    if n_train == 0 || n_train >= rows {
        return Err(Error::SplitTooSmall {
            rows,
            fraction: spec.train_fraction,
        });
    }
    let mut order: Vec<usize> = (0..rows).collect();
    order.shuffle(&mut stream_rng(spec.seed, "split", shuffle_index as u64));
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PredictorKind {
    /// Mode of the training distribution of the test row's context.
    MostProbable,
    /// Uniform draw over the alphabet.
    UniformRandom,
    /// Draw from the training marginal.
    MarginalRandom,
    /// Single-feature rule with the lowest training error.
    OneRule,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 4] = [
        PredictorKind::MostProbable,
        PredictorKind::UniformRandom,
        PredictorKind::MarginalRandom,
        PredictorKind::OneRule,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PredictorKind::MostProbable => "most-probable",
            PredictorKind::UniformRandom => "uniform-random",
            PredictorKind::MarginalRandom => "marginal-random",
            PredictorKind::OneRule => "one-rule",
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for PredictorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PredictorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown baseline `{s}`")))
    }
}

#[derive(Debug, Clone)]
struct OneRuleModel {
    feature: Option<usize>,
    rules: BTreeMap<String, OutcomeLabel>,
    fallback: OutcomeLabel,
    training_errors: usize,
}

#[derive(Debug, Clone)]
enum Fitted {
    MostProbable(Box<DistributionTable>),
    Uniform(Vec<OutcomeLabel>),
    Marginal(Vec<OutcomeLabel>, WeightedIndex<u64>),
    OneRule(OneRuleModel),
}

/// A fitted baseline. Random kinds own their stream: clone per worker.
#[derive(Debug, Clone)]
pub struct Predictor {
    kind: PredictorKind,
    projection: ContextProjection,
    fitted: Fitted,
    rng: ChaCha8Rng,
}

impl Predictor {
    /// Fits `kind` on `train`. `seed` keys the prediction stream of the
    /// random kinds.
    pub fn fit(
        kind: PredictorKind,
        train: &[Sample],
        projection: &ContextProjection,
        schema: &FeatureSchema,
        seed: u64,
    ) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::EmptyInput("cannot fit a predictor on an empty training set"));
        }
        let table = DistributionTable::build_with(train, projection.clone(), schema, ProbabilitySource::Train)?;
        let alphabet: Vec<OutcomeLabel> = table.alphabet().iter().cloned().collect();
        let fitted = match kind {
            PredictorKind::MostProbable => Fitted::MostProbable(Box::new(table)),
            PredictorKind::UniformRandom => Fitted::Uniform(alphabet),
            PredictorKind::MarginalRandom => {
                let marginal = table.marginal();
                let weights: Vec<u64> = alphabet.iter().map(|l| marginal.count(l)).collect();
                let index = WeightedIndex::new(weights)
                    .map_err(|e| Error::Invariant(format!("marginal weights: {e}")))?;
                Fitted::Marginal(alphabet, index)
            }
            PredictorKind::OneRule => Fitted::OneRule(fit_one_rule(train, projection, table.marginal().mode())),
        };
        Ok(Predictor {
            kind,
            projection: projection.clone(),
            fitted,
            rng: stream_rng(seed, "predictor", kind as u64),
        })
    }

    pub fn kind(&self) -> PredictorKind {
        self.kind
    }

    /// Misclassified training rows of the chosen rule (`OneRule` only).
    pub fn one_rule_training_errors(&self) -> Option<usize> {
        match &self.fitted {
            Fitted::OneRule(m) => Some(m.training_errors),
            _ => None,
        }
    }

    /// Feature index the rule splits on (`OneRule` only).
    pub fn one_rule_feature(&self) -> Option<usize> {
        match &self.fitted {
            Fitted::OneRule(m) => m.feature,
            _ => None,
        }
    }

    /// One label per row. Unseen contexts fall back to the training marginal
    /// mode (`MostProbable`) or the global mode (`OneRule`).
    pub fn predict(&mut self, test: &[Sample]) -> Result<Vec<OutcomeLabel>> {
        let mut out = Vec::with_capacity(test.len());
        for sample in test {
            let key = self.projection.project(sample)?;
            let label = match &self.fitted {
                Fitted::MostProbable(table) => match table.get(&key) {
                    Some(dist) => dist.mode().clone(),
                    None => table.marginal().mode().clone(),
                },
                Fitted::Uniform(alphabet) => alphabet[self.rng.random_range(0..alphabet.len())].clone(),
                Fitted::Marginal(labels, index) => labels[index.sample(&mut self.rng)].clone(),
                Fitted::OneRule(model) => model
                    .feature
                    .and_then(|f| model.rules.get(&sample.values[f]))
                    .unwrap_or(&model.fallback)
                    .clone(),
            };
            out.push(label);
        }
        Ok(out)
    }
}

/// Smallest label among those with the highest count.
fn mode_of(counts: &BTreeMap<OutcomeLabel, usize>) -> (&OutcomeLabel, usize) {
    let mut best: Option<(&OutcomeLabel, usize)> = None;
    for (label, &c) in counts {
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((label, c));
        }
    }
    best.expect("non-empty counts")
}

fn fit_one_rule(train: &[Sample], projection: &ContextProjection, global_mode: &OutcomeLabel) -> OneRuleModel {
    let global_errors = train.iter().filter(|s| &s.outcome != global_mode).count();
    let mut best = OneRuleModel {
        feature: None,
        rules: BTreeMap::new(),
        fallback: global_mode.clone(),
        training_errors: global_errors,
    };
    for &feature in projection.retained() {
        let mut by_value: BTreeMap<&str, BTreeMap<OutcomeLabel, usize>> = BTreeMap::new();
        for s in train {
            *by_value
                .entry(s.values[feature].as_str())
                .or_default()
                .entry(s.outcome.clone())
                .or_default() += 1;
        }
        let mut rules = BTreeMap::new();
        let mut errors = 0;
        for (value, counts) in &by_value {
            let (label, hits) = mode_of(counts);
            errors += counts.values().sum::<usize>() - hits;
            rules.insert(value.to_string(), label.clone());
        }
        // Ties keep the earliest feature.
        let better = match best.feature {
            None => errors <= best.training_errors,
            Some(_) => errors < best.training_errors,
        };
        if better {
            best = OneRuleModel {
                feature: Some(feature),
                rules,
                fallback: global_mode.clone(),
                training_errors: errors,
            };
        }
    }
    best
}

/// Replaces each outcome with an independent uniform draw over `alphabet`.
/// Features are untouched; an alphabet of one label leaves the data as is.
pub fn randomize_outputs(dataset: &[Sample], alphabet: &[OutcomeLabel], seed: u64) -> Vec<Sample> {
    if alphabet.len() <= 1 {
        return dataset.to_vec();
    }
    let mut rng = stream_rng(seed, "randomize-outputs", 0);
    dataset
        .iter()
        .map(|s| Sample {
            values: s.values.clone(),
            outcome: alphabet[rng.random_range(0..alphabet.len())].clone(),
        })
        .collect()
}
