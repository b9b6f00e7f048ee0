//! Per-sample error scoring, the relevance case taxonomy and the CA / RS
//! aggregates.
//!
//! Everything here is a pure function over probabilities. A prediction is
//! judged against three probabilities taken from the empirical outcome
//! distribution of its observed context: the mode `O_H`, the predicted
//! outcome `O_P` and the actual outcome `O_A`. Their pairwise absolute
//! differences feed a weighted error
//!
//! ```text
//! err   = (alpha * d_hp + beta * d_pa) / (alpha + beta)
//! score = (1 - err) * 100
//! ```
//!
//! and the Relevance Score is the mean of `score` over a test set, exactly as
//! Classification Accuracy is the mean of the 0/100 exact-match indicator.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distribution::ConditionalDistribution;
use crate::error::{Error, Result};

/// Absolute tolerance used when comparing empirical probabilities for the
/// case taxonomy.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A categorical outcome label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct OutcomeLabel(String);

impl OutcomeLabel {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidLabel("label must be non-empty".into()));
        }
        Ok(OutcomeLabel(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for OutcomeLabel {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        OutcomeLabel::new(value)
    }
}

impl From<OutcomeLabel> for String {
    fn from(label: OutcomeLabel) -> String {
        label.0
    }
}

impl std::str::FromStr for OutcomeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OutcomeLabel::new(s)
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.0)
    }
}

/// The `(alpha, beta)` weights of the error score: `alpha` weighs the
/// mode-to-prediction distance, `beta` the prediction-to-actual distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsParams {
    alpha: f64,
    beta: f64,
}

impl RsParams {
    /// Either weight may be zero, but not both.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "alpha and beta must be finite (got {alpha}, {beta})"
            )));
        }
        if alpha < 0.0 || beta < 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha and beta must be non-negative (got {alpha}, {beta})"
            )));
        }
        if alpha + beta <= 0.0 {
            return Err(Error::InvalidParams("alpha + beta must be positive".into()));
        }
        Ok(RsParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for RsParams {
    fn default() -> Self {
        RsParams {
            alpha: 2.0,
            beta: 1.0,
        }
    }
}

/// Probabilities of the mode, predicted and actual outcomes within one
/// context distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTriple {
    pub p_h: f64,
    pub p_p: f64,
    pub p_a: f64,
}

impl ProbabilityTriple {
    /// Checks `0 <= p_p, p_a <= p_h <= 1`.
    pub fn new(p_h: f64, p_p: f64, p_a: f64) -> Result<Self> {
        let in_unit = |p: f64| (0.0..=1.0).contains(&p);
        if !(in_unit(p_h) && in_unit(p_p) && in_unit(p_a)) {
            return Err(Error::InvalidParams(format!(
                "probabilities must lie in [0, 1] (got {p_h}, {p_p}, {p_a})"
            )));
        }
        if p_p > p_h || p_a > p_h {
            return Err(Error::InvalidParams(format!(
                "mode probability {p_h} is below predicted {p_p} or actual {p_a}"
            )));
        }
        Ok(ProbabilityTriple { p_h, p_p, p_a })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceTriple {
    pub d_hp: f64,
    pub d_pa: f64,
    pub d_ha: f64,
}

/// Qualitative relevance of a prediction, from most to least relevant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Case {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
    CaseOther,
}

impl Case {
    pub const ALL: [Case; 6] = [
        Case::Case1,
        Case::Case2,
        Case::Case3,
        Case::Case4,
        Case::Case5,
        Case::CaseOther,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Case::Case1 => "Case1",
            Case::Case2 => "Case2",
            Case::Case3 => "Case3",
            Case::Case4 => "Case4",
            Case::Case5 => "Case5",
            Case::CaseOther => "CaseOther",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Case::Case1 => "HighlyRelevant",
            Case::Case2 => "ModeratelyRelevant",
            Case::Case3 => "Relevant",
            Case::Case4 => "LessRelevant",
            Case::Case5 => "Irrelevant",
            Case::CaseOther => "Unclassified",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

/// Everything computed for one test row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEvaluation {
    pub predicted: OutcomeLabel,
    pub actual: OutcomeLabel,
    pub probs: ProbabilityTriple,
    pub distances: DistanceTriple,
    pub case: Case,
    pub err_score: f64,
    pub score: f64,
}

impl SampleEvaluation {
    pub fn is_match(&self) -> bool {
        self.predicted == self.actual
    }

    /// Score of this sample under other weights. Distances do not depend on
    /// the weights, so nothing else needs recomputing.
    pub fn score_with(&self, params: &RsParams) -> f64 {
        if self.is_match() {
            100.0
        } else {
            (1.0 - err_score(&self.distances, params)) * 100.0
        }
    }
}

pub fn distances(probs: &ProbabilityTriple) -> DistanceTriple {
    DistanceTriple {
        d_hp: (probs.p_h - probs.p_p).abs(),
        d_pa: (probs.p_p - probs.p_a).abs(),
        d_ha: (probs.p_h - probs.p_a).abs(),
    }
}

/// Weighted, normalized error in `[0, 1]`. `d_ha` takes no part.
pub fn err_score(distances: &DistanceTriple, params: &RsParams) -> f64 {
    (params.alpha * distances.d_hp + params.beta * distances.d_pa) / (params.alpha + params.beta)
}

/// Places a prediction in the relevance taxonomy. Probabilities closer than
/// `tolerance` count as equal.
pub fn classify_case(
    predicted: &OutcomeLabel,
    actual: &OutcomeLabel,
    probs: &ProbabilityTriple,
    tolerance: f64,
) -> Case {
    if predicted == actual {
        return Case::Case1;
    }
    let eq = |a: f64, b: f64| (a - b).abs() <= tolerance;
    let gt = |a: f64, b: f64| a - b > tolerance;
    let ProbabilityTriple { p_h, p_p, p_a } = *probs;

    if eq(p_h, p_p) && gt(p_p, p_a) {
        Case::Case2
    } else if gt(p_h, p_p) && gt(p_p, p_a) {
        Case::Case3
    } else if gt(p_h, p_a) && gt(p_a, p_p) {
        Case::Case4
    } else if eq(p_h, p_a) && gt(p_a, p_p) {
        Case::Case5
    } else {
        Case::CaseOther
    }
}

/// Scores one prediction against its context distribution. Labels missing
/// from the distribution have probability 0.
pub fn score_sample(
    predicted: &OutcomeLabel,
    actual: &OutcomeLabel,
    dist: &ConditionalDistribution,
    params: &RsParams,
) -> SampleEvaluation {
    let probs = ProbabilityTriple {
        p_h: dist.mode_probability(),
        p_p: dist.probability(predicted),
        p_a: dist.probability(actual),
    };
    evaluate_probabilities(predicted, actual, probs, params)
}

/// Same as [`score_sample`] with the probabilities already looked up.
pub fn evaluate_probabilities(
    predicted: &OutcomeLabel,
    actual: &OutcomeLabel,
    probs: ProbabilityTriple,
    params: &RsParams,
) -> SampleEvaluation {
    let distances = distances(&probs);
    let case = classify_case(predicted, actual, &probs, DEFAULT_TOLERANCE);
    let err = if predicted == actual {
        0.0
    } else {
        err_score(&distances, params)
    };
    SampleEvaluation {
        predicted: predicted.clone(),
        actual: actual.clone(),
        probs,
        distances,
        case,
        err_score: err,
        score: (1.0 - err) * 100.0,
    }
}

/// Mean of per-sample scores.
pub fn relevance_score(evals: &[SampleEvaluation]) -> Result<f64> {
    if evals.is_empty() {
        return Err(Error::EmptyInput("relevance score needs at least one sample"));
    }
    Ok(mean(evals.iter().map(|e| e.score)))
}

/// Relevance score of already-evaluated samples under different weights.
pub fn relevance_score_with(evals: &[SampleEvaluation], params: &RsParams) -> Result<f64> {
    if evals.is_empty() {
        return Err(Error::EmptyInput("relevance score needs at least one sample"));
    }
    Ok(mean(evals.iter().map(|e| e.score_with(params))))
}

/// Mean of arbitrary per-sample scores, e.g. hand-assigned ones.
pub fn mean_score(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("mean of an empty score list"));
    }
    Ok(mean(scores.iter().copied()))
}

/// Percentage of exact matches.
pub fn classification_accuracy(predicted: &[OutcomeLabel], actual: &[OutcomeLabel]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::EmptyInput("classification accuracy needs at least one sample"));
    }
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(100.0 * hits as f64 / predicted.len() as f64)
}

/// Classification accuracy of already-evaluated samples.
pub fn accuracy_of(evals: &[SampleEvaluation]) -> Result<f64> {
    if evals.is_empty() {
        return Err(Error::EmptyInput("classification accuracy needs at least one sample"));
    }
    let hits = evals.iter().filter(|e| e.is_match()).count();
    Ok(100.0 * hits as f64 / evals.len() as f64)
}

/// RS in the limit `alpha -> inf`: mismatches score `(1 - d_hp) * 100`.
pub fn rs_limit_alpha(evals: &[SampleEvaluation]) -> Result<f64> {
    limit(evals, |d| d.d_hp)
}

/// RS in the limit `beta -> inf`: mismatches score `(1 - d_pa) * 100`.
pub fn rs_limit_beta(evals: &[SampleEvaluation]) -> Result<f64> {
    limit(evals, |d| d.d_pa)
}

fn limit(evals: &[SampleEvaluation], dist: impl Fn(&DistanceTriple) -> f64) -> Result<f64> {
    if evals.is_empty() {
        return Err(Error::EmptyInput("limit bound needs at least one sample"));
    }
    Ok(mean(evals.iter().map(|e| {
        if e.is_match() {
            100.0
        } else {
            (1.0 - dist(&e.distances)) * 100.0
        }
    })))
}

/// Neumaier-compensated arithmetic mean. Callers guarantee non-empty input.
pub(crate) fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    let mut n = 0usize;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
        n += 1;
    }
    (sum + compensation) / n as f64
}
