//! Synthetic stand-in for a lighting-control dataset: six categorical
//! features, eight presets, and a user whose choice is only partly explained
//! by what the sensors see.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relevance_score::io::Dataset;
use relevance_score::prelude::*;

pub const PRESETS: [&str; 8] = [
    "static-warm-dim",
    "static-warm-bright",
    "static-cool-dim",
    "static-cool-bright",
    "dynamic-warm-dim",
    "dynamic-warm-bright",
    "dynamic-cool-dim",
    "dynamic-cool-bright",
];

pub const FEATURES: [&str; 6] = ["user", "activity", "area", "users", "time", "external"];

/// `m` rows; with probability `consistency` the user picks the preset implied
/// by activity and time, otherwise one of two personal favourites.
pub fn lighting(m: usize, consistency: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let activities = ["read", "meet", "relax", "present"];
    let times = ["morning", "afternoon", "evening"];
    let samples = (0..m)
        .map(|_| {
            let user = rng.random_range(0..5usize);
            let activity = rng.random_range(0..activities.len());
            let time = rng.random_range(0..times.len());
            let values = vec![
                format!("user{user}"),
                activities[activity].to_string(),
                format!("area{}", rng.random_range(0..2)),
                ["one", "few", "many"][rng.random_range(0..3)].to_string(),
                times[time].to_string(),
                ["sunny", "cloudy"][rng.random_range(0..2)].to_string(),
            ];
            let preset = if rng.random_bool(consistency) {
                (activity * 2 + time) % 8
            } else {
                (user + rng.random_range(0..2) * 3) % 8
            };
            Sample::new(values, OutcomeLabel::new(PRESETS[preset]).unwrap())
        })
        .collect();
    let schema = FeatureSchema::new(FEATURES.iter().map(|f| f.to_string()).collect(), "preset")
        .unwrap()
        .with_labels(PRESETS.iter().map(|p| OutcomeLabel::new(*p).unwrap()));
    Dataset {
        schema,
        samples,
        digest: format!("synthetic-lighting-{m}-{seed}"),
    }
}

#[allow(dead_code)]
pub fn baselines() -> Vec<ModelSpec> {
    PredictorKind::ALL.iter().map(|&k| ModelSpec::Baseline(k)).collect()
}
