//! # relevance-score
//!
//! Evaluation of classifiers for tasks where one observed context admits
//! several acceptable outcomes: the user of a smart-lighting system picks
//! different presets in what the sensors see as the same situation, a driver
//! takes different routes under the same observed conditions. Classification
//! Accuracy (CA) scores every mismatch as zero; the Relevance Score (RS)
//! instead scores a mismatch by how close the predicted outcome's empirical
//! probability is to the mode's and to the actual outcome's.
//!
//! The computation has two phases:
//!
//! 1. [`distribution`]: group samples by their reduced context (features that
//!    drive the randomness, such as user identity, removed) and count outcomes.
//! 2. [`metric`]: per test sample, look up `P(mode)`, `P(predicted)`,
//!    `P(actual)`, take their distances and score
//!    `(1 - (alpha*d_hp + beta*d_pa)/(alpha+beta)) * 100`; RS is the mean.
//!
//! ```
//! use relevance_score::prelude::*;
//!
//! # fn main() -> relevance_score::Result<()> {
//! let schema = FeatureSchema::new(vec!["user".into(), "activity".into()], "preset")?;
//! let l = |s: &str| OutcomeLabel::new(s).unwrap();
//! let data: Vec<Sample> = ["LA", "LA", "LA", "LA", "LB", "LB", "LB", "LB", "LC", "LC"]
//!     .iter()
//!     .enumerate()
//!     .map(|(i, o)| Sample::new([format!("U{i}"), "read".into()], l(o)))
//!     .collect();
//! let table = DistributionTable::build(&data, &["user"], &schema, ProbabilitySource::Full)?;
//! let dist = table.lookup_sample(&data[0], UnseenPolicy::Uniform)?;
//!
//! let eval = score_sample(&l("LC"), &l("LA"), dist, &RsParams::default());
//! assert!((eval.score - 80.0).abs() < 1e-9);
//! assert_eq!(eval.case, Case::Case5);
//! # Ok(())
//! # }
//! ```
//!
//! [`baselines`] holds native predictors, seeded splitting and the
//! randomized-output transform; [`experiments`] runs the full protocol
//! (shuffle-averaged CA/RS, (alpha, beta) sweeps, limit bounds, random-output
//! control); [`io`] reads datasets and prediction files and writes reports.

pub mod baselines;
pub mod distribution;
pub mod error;
pub mod experiments;
pub mod io;
pub mod metric;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::baselines::{randomize_outputs, split, Predictor, PredictorKind, SplitSpec};
    pub use crate::distribution::{
        reduce_context, ConditionalDistribution, ContextKey, ContextProjection, DistributionTable, FeatureSchema,
        ProbabilitySource, Sample, UnseenPolicy,
    };
    pub use crate::experiments::{Experiment, ModelSpec, RunConfig, SweepSpec};
    pub use crate::io::{load_dataset, load_predictions, read_report, write_report, DatasetOptions, EvaluationReport, ReportFormat};
    pub use crate::metric::{
        classification_accuracy, classify_case, distances, err_score, relevance_score, rs_limit_alpha, rs_limit_beta,
        score_sample, Case, DistanceTriple, OutcomeLabel, ProbabilityTriple, RsParams, SampleEvaluation,
    };
}
