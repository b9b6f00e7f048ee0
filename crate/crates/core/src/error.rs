use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("length mismatch: {left} predicted vs {right} actual")]
    LengthMismatch { left: usize, right: usize },

    #[error("unknown feature `{0}` in exclusion set")]
    UnknownFeature(String),

    #[error("sample {row} has {found} feature values, schema declares {expected}")]
    Arity {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("no distribution for context {0} (unseen-context policy is `error`)")]
    MissingDistribution(String),

    #[error("cannot split {rows} rows with train fraction {fraction}: both parts must be non-empty")]
    SplitTooSmall { rows: usize, fraction: f64 },

    #[error("{path}: file not found")]
    MissingFile { path: PathBuf },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: line {line}: expected {expected} columns, found {found}")]
    RaggedRow {
        path: PathBuf,
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("{path}: line {line}, column {column}: empty token")]
    EmptyToken {
        path: PathBuf,
        line: u64,
        column: usize,
    },

    #[error("{path}: line 1: outcome column `{column}` not in header")]
    MissingOutcomeColumn { path: PathBuf, column: String },

    #[error("{path}: line 1: header has no data rows")]
    EmptyBody { path: PathBuf },

    #[error("{path}: line {line}: duplicate prediction index {index}")]
    DuplicateIndex {
        path: PathBuf,
        line: u64,
        index: usize,
    },

    #[error("{path}: line {line}: prediction index {index} out of range 0..{len}")]
    IndexOutOfRange {
        path: PathBuf,
        line: u64,
        index: usize,
        len: usize,
    },

    #[error("{path}: {missing} of {len} evaluation rows have no prediction (first missing index {first})")]
    IncompleteCoverage {
        path: PathBuf,
        len: usize,
        missing: usize,
        first: usize,
    },

    #[error("report serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("configuration: {0}")]
    Config(String),

    #[error("model `{model}`: {source}")]
    Model {
        model: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn in_model(self, model: &str) -> Error {
        Error::Model {
            model: model.to_string(),
            source: Box::new(self),
        }
    }

    /// Process exit code: 1 configuration, 2 data, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Model { source, .. } => source.exit_code(),
            Error::InvalidParams(_)
            | Error::Config(_)
            | Error::UnknownFeature(_)
            | Error::InvalidSchema(_) => 1,
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}
