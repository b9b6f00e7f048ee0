//! Empirical outcome distributions conditioned on a reduced observed context.
//!
//! Features that drive the randomness of the outcome (a user identity, say)
//! are dropped from every sample before grouping; the remaining feature
//! values form a [`ContextKey`], and each key gets the raw frequency of every
//! outcome in the alphabet.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::OutcomeLabel;

/// Categorical feature columns plus the outcome column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    features: Vec<String>,
    outcome: String,
    declared_labels: BTreeSet<OutcomeLabel>,
}

impl FeatureSchema {
    pub fn new(features: Vec<String>, outcome: impl Into<String>) -> Result<Self> {
        let outcome = outcome.into();
        let mut seen = BTreeSet::new();
        for name in &features {
            if name.is_empty() {
                return Err(Error::InvalidSchema("empty feature name".into()));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidSchema(format!("duplicate feature `{name}`")));
            }
        }
        if seen.contains(outcome.as_str()) {
            return Err(Error::InvalidSchema(format!(
                "outcome column `{outcome}` is also an input feature"
            )));
        }
        Ok(FeatureSchema {
            features,
            outcome,
            declared_labels: BTreeSet::new(),
        })
    }

    /// Declares outcome labels that belong to the alphabet even when no
    /// sample carries them.
    pub fn with_labels(mut self, labels: impl IntoIterator<Item = OutcomeLabel>) -> Self {
        self.declared_labels.extend(labels);
        self
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn outcome_column(&self) -> &str {
        &self.outcome
    }

    pub fn declared_labels(&self) -> &BTreeSet<OutcomeLabel> {
        &self.declared_labels
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sample {
    pub values: Vec<String>,
    pub outcome: OutcomeLabel,
}

impl Sample {
    pub fn new<S: Into<String>>(values: impl IntoIterator<Item = S>, outcome: OutcomeLabel) -> Self {
        Sample {
            values: values.into_iter().map(Into::into).collect(),
            outcome,
        }
    }
}

/// Retained feature values of a sample, in schema order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ContextKey(pub Vec<String>);

impl fmt::Display for ContextKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.join(", "))
    }
}

/// Projection of samples onto the features that survive an exclusion set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextProjection {
    retained: Vec<usize>,
    arity: usize,
    excluded: BTreeSet<String>,
}

impl ContextProjection {
    pub fn new<S: AsRef<str>>(schema: &FeatureSchema, excluded: &[S]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for name in excluded {
            let name = name.as_ref();
            if schema.feature_index(name).is_none() {
                return Err(Error::UnknownFeature(name.to_string()));
            }
            set.insert(name.to_string());
        }
        let retained = schema
            .features()
            .iter()
            .enumerate()
            .filter(|(_, f)| !set.contains(*f))
            .map(|(i, _)| i)
            .collect();
        Ok(ContextProjection {
            retained,
            arity: schema.features().len(),
            excluded: set,
        })
    }

    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn excluded(&self) -> &BTreeSet<String> {
        &self.excluded
    }

    pub fn project(&self, sample: &Sample) -> Result<ContextKey> {
        self.check_arity(sample, 0)?;
        Ok(self.key_of(sample))
    }

    fn check_arity(&self, sample: &Sample, row: usize) -> Result<()> {
        if sample.values.len() != self.arity {
            return Err(Error::Arity {
                row,
                expected: self.arity,
                found: sample.values.len(),
            });
        }
        Ok(())
    }

    fn key_of(&self, sample: &Sample) -> ContextKey {
        ContextKey(self.retained.iter().map(|&i| sample.values[i].clone()).collect())
    }
}

/// Projects one sample onto the features not in `excluded`.
pub fn reduce_context<S: AsRef<str>>(
    sample: &Sample,
    excluded: &[S],
    schema: &FeatureSchema,
) -> Result<ContextKey> {
    ContextProjection::new(schema, excluded)?.project(sample)
}

/// How a distribution came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionOrigin {
    Observed,
    /// Unseen context, one pseudo-count per alphabet label.
    Uniform,
    /// Unseen context, dataset-wide outcome counts.
    Marginal,
}

/// Outcome frequencies for one context, covering the whole alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDistribution {
    context: ContextKey,
    counts: BTreeMap<OutcomeLabel, u64>,
    probabilities: BTreeMap<OutcomeLabel, f64>,
    total: u64,
    mode: OutcomeLabel,
    origin: DistributionOrigin,
}

impl ConditionalDistribution {
    /// `counts` must hold every alphabet label (zeros included) and a
    /// positive total.
    fn from_counts(
        context: ContextKey,
        counts: BTreeMap<OutcomeLabel, u64>,
        origin: DistributionOrigin,
    ) -> Self {
        let total: u64 = counts.values().sum();
        debug_assert!(total > 0);
        let probabilities = counts
            .iter()
            .map(|(label, &c)| (label.clone(), c as f64 / total as f64))
            .collect();
        // BTreeMap order makes the first maximum the lexicographically smallest.
        let mut mode = None;
        let mut best = 0u64;
        for (label, &c) in &counts {
            if mode.is_none() || c > best {
                mode = Some(label);
                best = c;
            }
        }
        let mode = mode.cloned().expect("non-empty alphabet");
        ConditionalDistribution {
            context,
            counts,
            probabilities,
            total,
            mode,
            origin,
        }
    }

    pub fn context(&self) -> &ContextKey {
        &self.context
    }

    pub fn counts(&self) -> &BTreeMap<OutcomeLabel, u64> {
        &self.counts
    }

    pub fn probabilities(&self) -> &BTreeMap<OutcomeLabel, f64> {
        &self.probabilities
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn origin(&self) -> DistributionOrigin {
        self.origin
    }

    /// Number of outcomes with non-zero count.
    pub fn support_size(&self) -> usize {
        self.counts.values().filter(|&&c| c > 0).count()
    }

    /// Zero for labels outside the alphabet.
    pub fn probability(&self, label: &OutcomeLabel) -> f64 {
        self.probabilities.get(label).copied().unwrap_or(0.0)
    }

    pub fn count(&self, label: &OutcomeLabel) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    /// Most probable outcome; ties go to the lexicographically smallest label.
    pub fn mode(&self) -> &OutcomeLabel {
        &self.mode
    }

    pub fn mode_probability(&self) -> f64 {
        self.probability(&self.mode)
    }
}

/// Which rows the probabilities were estimated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilitySource {
    /// Every row of the dataset, test rows included.
    #[default]
    Full,
    /// Training rows only.
    Train,
}

impl ProbabilitySource {
    pub fn as_str(self) -> &'static str {
        match self {
            ProbabilitySource::Full => "full",
            ProbabilitySource::Train => "train",
        }
    }
}

impl std::str::FromStr for ProbabilitySource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ProbabilitySource::Full),
            "train" => Ok(ProbabilitySource::Train),
            other => Err(Error::Config(format!("unknown probability source `{other}`"))),
        }
    }
}

/// What [`DistributionTable::lookup`] does for a context it has never seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnseenPolicy {
    Error,
    #[default]
    Uniform,
    Marginal,
}

impl UnseenPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            UnseenPolicy::Error => "error",
            UnseenPolicy::Uniform => "uniform",
            UnseenPolicy::Marginal => "marginal",
        }
    }
}

impl std::str::FromStr for UnseenPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "error" => Ok(UnseenPolicy::Error),
            "uniform" => Ok(UnseenPolicy::Uniform),
            "marginal" => Ok(UnseenPolicy::Marginal),
            other => Err(Error::Config(format!("unknown unseen-context policy `{other}`"))),
        }
    }
}

/// Conditional distributions for every observed context.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    entries: BTreeMap<ContextKey, ConditionalDistribution>,
    alphabet: BTreeSet<OutcomeLabel>,
    projection: ContextProjection,
    marginal: ConditionalDistribution,
    uniform: ConditionalDistribution,
    source: ProbabilitySource,
}

impl DistributionTable {
    /// Groups `dataset` by reduced context and counts outcomes. The alphabet
    /// is every observed outcome plus the schema's declared labels.
    pub fn build<S: AsRef<str>>(
        dataset: &[Sample],
        excluded: &[S],
        schema: &FeatureSchema,
        source: ProbabilitySource,
    ) -> Result<Self> {
        let projection = ContextProjection::new(schema, excluded)?;
        Self::build_with(dataset, projection, schema, source)
    }

    pub fn build_with(
        dataset: &[Sample],
        projection: ContextProjection,
        schema: &FeatureSchema,
        source: ProbabilitySource,
    ) -> Result<Self> {
        if dataset.is_empty() {
            return Err(Error::EmptyInput("distribution table needs at least one sample"));
        }
        let mut alphabet = schema.declared_labels().clone();
        let mut grouped: BTreeMap<ContextKey, BTreeMap<OutcomeLabel, u64>> = BTreeMap::new();
        for (row, sample) in dataset.iter().enumerate() {
            projection.check_arity(sample, row)?;
            alphabet.insert(sample.outcome.clone());
            *grouped
                .entry(projection.key_of(sample))
                .or_default()
                .entry(sample.outcome.clone())
                .or_default() += 1;
        }

        let closed = |observed: &BTreeMap<OutcomeLabel, u64>| {
            alphabet
                .iter()
                .map(|l| (l.clone(), observed.get(l).copied().unwrap_or(0)))
                .collect::<BTreeMap<_, _>>()
        };

        let mut marginal_counts = BTreeMap::new();
        for counts in grouped.values() {
            for (label, c) in counts {
                *marginal_counts.entry(label.clone()).or_insert(0) += c;
            }
        }
        let marginal = ConditionalDistribution::from_counts(
            ContextKey(Vec::new()),
            closed(&marginal_counts),
            DistributionOrigin::Marginal,
        );
        let uniform = ConditionalDistribution::from_counts(
            ContextKey(Vec::new()),
            alphabet.iter().map(|l| (l.clone(), 1)).collect(),
            DistributionOrigin::Uniform,
        );
        let entries = grouped
            .into_iter()
            .map(|(key, counts)| {
                let dist = ConditionalDistribution::from_counts(
                    key.clone(),
                    closed(&counts),
                    DistributionOrigin::Observed,
                );
                (key, dist)
            })
            .collect();

        Ok(DistributionTable {
            entries,
            alphabet,
            projection,
            marginal,
            uniform,
            source,
        })
    }

    pub fn lookup(&self, key: &ContextKey, policy: UnseenPolicy) -> Result<&ConditionalDistribution> {
        match (self.entries.get(key), policy) {
            (Some(dist), _) => Ok(dist),
            (None, UnseenPolicy::Uniform) => Ok(&self.uniform),
            (None, UnseenPolicy::Marginal) => Ok(&self.marginal),
            (None, UnseenPolicy::Error) => Err(Error::MissingDistribution(key.to_string())),
        }
    }

    /// Looks up the distribution of a sample's reduced context.
    pub fn lookup_sample(&self, sample: &Sample, policy: UnseenPolicy) -> Result<&ConditionalDistribution> {
        let key = self.projection.project(sample)?;
        self.lookup(&key, policy)
    }

    pub fn get(&self, key: &ContextKey) -> Option<&ConditionalDistribution> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = &ConditionalDistribution> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn alphabet(&self) -> &BTreeSet<OutcomeLabel> {
        &self.alphabet
    }

    pub fn marginal(&self) -> &ConditionalDistribution {
        &self.marginal
    }

    pub fn projection(&self) -> &ContextProjection {
        &self.projection
    }

    pub fn source(&self) -> ProbabilitySource {
        self.source
    }
}
