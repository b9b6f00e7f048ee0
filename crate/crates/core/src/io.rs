//! Dataset, prediction and report files.
//!
//! Datasets are delimiter-separated categorical tables with a header line.
//! Tokens are trimmed and never quoted. Prediction files are `index,predicted`
//! tables keyed by the 0-based row of the evaluation split. Reports are JSON
//! (canonical) or a one-row CSV projection of the aggregates.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distribution::{FeatureSchema, Sample};
use crate::error::{Error, Result};
use crate::metric::{mean, Case, OutcomeLabel, RsParams, SampleEvaluation};

#[derive(Debug, Clone)]
pub struct DatasetOptions {
    pub delimiter: u8,
    /// Defaults to the last header column.
    pub outcome_column: Option<String>,
    /// Labels added to the alphabet whether observed or not.
    pub labels: Vec<OutcomeLabel>,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        DatasetOptions {
            delimiter: b',',
            outcome_column: None,
            labels: Vec::new(),
        }
    }
}

/// A loaded dataset. Immutable once parsed.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub schema: FeatureSchema,
    pub samples: Vec<Sample>,
    /// Hex SHA-256 of the source bytes.
    pub digest: String,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::MissingFile { path: path.to_path_buf() }
        } else {
            Error::Io { path: path.to_path_buf(), source }
        }
    })
}

fn records(bytes: &[u8], delimiter: u8, path: &Path) -> Result<Vec<(u64, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        out.push((line, record.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

pub fn load_dataset(path: impl AsRef<Path>, options: &DatasetOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    parse_dataset(&bytes, options, path)
}

/// Parses dataset bytes; `path` only labels error messages.
pub fn parse_dataset(bytes: &[u8], options: &DatasetOptions, path: &Path) -> Result<Dataset> {
    let mut rows = records(bytes, options.delimiter, path)?.into_iter();
    let (header_line, header) = rows.next().ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: "missing header".into(),
    })?;
    for (column, name) in header.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::EmptyToken {
                path: path.to_path_buf(),
                line: header_line,
                column: column + 1,
            });
        }
    }
    let outcome_name = options
        .outcome_column
        .clone()
        .unwrap_or_else(|| header.last().cloned().unwrap_or_default());
    let outcome_index = header
        .iter()
        .position(|h| *h == outcome_name)
        .ok_or_else(|| Error::MissingOutcomeColumn {
            path: path.to_path_buf(),
            column: outcome_name.clone(),
        })?;
    let features: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != outcome_index)
        .map(|(_, h)| h.clone())
        .collect();
    let schema = FeatureSchema::new(features, outcome_name)
        .map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: header_line,
            message: e.to_string(),
        })?
        .with_labels(options.labels.iter().cloned());

    let mut samples = Vec::new();
    for (line, row) in rows {
        if row.len() != header.len() {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                line,
                expected: header.len(),
                found: row.len(),
            });
        }
        if let Some(column) = row.iter().position(String::is_empty) {
            return Err(Error::EmptyToken {
                path: path.to_path_buf(),
                line,
                column: column + 1,
            });
        }
        let mut values = row;
        let outcome = OutcomeLabel::new(values.remove(outcome_index))?;
        samples.push(Sample { values, outcome });
    }
    if samples.is_empty() {
        return Err(Error::EmptyBody { path: path.to_path_buf() });
    }
    Ok(Dataset {
        schema,
        samples,
        digest: hex::encode(Sha256::digest(bytes)),
    })
}

/// Predictions for an evaluation split, ordered by row index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionFile {
    pub predicted: Vec<OutcomeLabel>,
}

pub fn load_predictions(path: impl AsRef<Path>, expected_len: usize) -> Result<PredictionFile> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    parse_predictions(&bytes, expected_len, path)
}

pub fn parse_predictions(bytes: &[u8], expected_len: usize, path: &Path) -> Result<PredictionFile> {
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rows = records(bytes, b',', path)?.into_iter();
    match rows.next() {
        Some((_, header)) if header == ["index", "predicted"] => {}
        Some((line, header)) => {
            return Err(parse_err(
                line,
                format!("expected header `index,predicted`, found `{}`", header.join(",")),
            ))
        }
        None => return Err(parse_err(1, "missing header `index,predicted`".into())),
    }

    let mut slots: Vec<Option<OutcomeLabel>> = vec![None; expected_len];
    for (line, row) in rows {
        if row.len() != 2 {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                line,
                expected: 2,
                found: row.len(),
            });
        }
        let index: usize = row[0]
            .parse()
            .map_err(|_| parse_err(line, format!("`{}` is not a row index", row[0])))?;
        let label = OutcomeLabel::new(row[1].clone()).map_err(|_| Error::EmptyToken {
            path: path.to_path_buf(),
            line,
            column: 2,
        })?;
        let slot = slots.get_mut(index).ok_or_else(|| Error::IndexOutOfRange {
            path: path.to_path_buf(),
            line,
            index,
            len: expected_len,
        })?;
        if slot.is_some() {
            return Err(Error::DuplicateIndex {
                path: path.to_path_buf(),
                line,
                index,
            });
        }
        *slot = Some(label);
    }

    let missing: Vec<usize> = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_none())
        .map(|(i, _)| i)
        .collect();
    if let Some(&first) = missing.first() {
        return Err(Error::IncompleteCoverage {
            path: path.to_path_buf(),
            len: expected_len,
            missing: missing.len(),
            first,
        });
    }
    Ok(PredictionFile {
        predicted: slots.into_iter().flatten().collect(),
    })
}

/// Aggregates for one model, plus optional per-sample detail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub ca: f64,
    pub rs: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rs_alpha_inf: f64,
    pub rs_beta_inf: f64,
    pub cases: BTreeMap<String, u64>,
    pub provenance: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<SampleEvaluation>>,
}

impl EvaluationReport {
    pub fn params(&self) -> Result<RsParams> {
        RsParams::new(self.alpha, self.beta)
    }

    pub fn case_count(&self, case: Case) -> u64 {
        self.cases.get(case.name()).copied().unwrap_or(0)
    }

    /// Checks the histogram and per-sample invariants.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("ca", self.ca),
            ("rs", self.rs),
            ("rs_alpha_inf", self.rs_alpha_inf),
            ("rs_beta_inf", self.rs_beta_inf),
        ] {
            if !(0.0..=100.0).contains(&value) {
                return Err(Error::Invariant(format!("{name} = {value} outside [0, 100]")));
            }
        }
        self.params()?;
        if let Some(samples) = &self.samples {
            let total: u64 = self.cases.values().sum();
            if total != samples.len() as u64 {
                return Err(Error::Invariant(format!(
                    "case histogram counts {total} samples, report holds {}",
                    samples.len()
                )));
            }
            if !samples.is_empty() {
                let rs = mean(samples.iter().map(|s| s.score));
                if (rs - self.rs).abs() > 1e-9 {
                    return Err(Error::Invariant(format!(
                        "rs {} differs from per-sample mean {rs}",
                        self.rs
                    )));
                }
            }
        }
        Ok(())
    }

    /// Pretty JSON of everything except the per-sample section.
    pub fn aggregates_json(&self) -> Result<String> {
        let aggregates = EvaluationReport {
            samples: None,
            ..self.clone()
        };
        Ok(serde_json::to_string_pretty(&aggregates)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Zero-filled histogram with every case present.
pub fn case_histogram<'a>(evals: impl IntoIterator<Item = &'a SampleEvaluation>) -> BTreeMap<String, u64> {
    let mut cases: BTreeMap<String, u64> = Case::ALL.iter().map(|c| (c.name().to_string(), 0)).collect();
    for e in evals {
        *cases.entry(e.case.name().to_string()).or_default() += 1;
    }
    cases
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

pub fn write_report(report: &EvaluationReport, path: impl AsRef<Path>, format: ReportFormat) -> Result<()> {
    let path = path.as_ref();
    report.validate()?;
    let mut text = match format {
        ReportFormat::Json => report.to_json()?,
        ReportFormat::Csv => report_csv(report),
    };
    if !text.ends_with('\n') {
        text.push('\n');
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report(path: impl AsRef<Path>) -> Result<EvaluationReport> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}

fn report_csv(report: &EvaluationReport) -> String {
    let mut header: Vec<String> = ["ca", "rs", "alpha", "beta", "rs_alpha_inf", "rs_beta_inf"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut row: Vec<String> = [
        report.ca,
        report.rs,
        report.alpha,
        report.beta,
        report.rs_alpha_inf,
        report.rs_beta_inf,
    ]
    .iter()
    .map(|v| v.to_string())
    .collect();
    for (case, count) in &report.cases {
        header.push(case.clone());
        row.push(count.to_string());
    }
    for (key, value) in &report.provenance {
        header.push(key.clone());
        row.push(value.clone());
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&header).expect("in-memory write");
    writer.write_record(&row).expect("in-memory write");
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// `base.ext` becomes `base.<tag>.ext`.
pub fn tagged_path(base: &Path, tag: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{tag}"),
    };
    base.with_file_name(name)
}

/// Distinct labels of a sample set.
pub fn observed_labels(samples: &[Sample]) -> BTreeSet<OutcomeLabel> {
    samples.iter().map(|s| s.outcome.clone()).collect()
}
