use std::path::{Path, PathBuf};

use approx::assert_abs_diff_eq;
use relevance_score::experiments::{sweep_csv, SweepPoint};
use relevance_score::io::Dataset;
use relevance_score::prelude::*;

fn label(s: &str) -> OutcomeLabel {
    OutcomeLabel::new(s).unwrap()
}

fn dataset(rows: Vec<(Vec<String>, &str)>, features: &[&str]) -> Dataset {
    Dataset {
        schema: FeatureSchema::new(features.iter().map(|s| s.to_string()).collect(), "preset").unwrap(),
        samples: rows.into_iter().map(|(v, o)| Sample::new(v, label(o))).collect(),
        digest: "in-memory".into(),
    }
}

/// One context (after dropping `user`) with the given outcome multiset.
fn single_context(outcomes: &[&str]) -> Dataset {
    let rows = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| (vec![format!("U{i}"), "read".into()], *o))
        .collect();
    dataset(rows, &["user", "activity"])
}

fn write_predictions(dir: &Path, name: &str, labels: &[&str]) -> PathBuf {
    let mut text = String::from("index,predicted\n");
    for (i, l) in labels.iter().enumerate() {
        text.push_str(&format!("{i},{l}\n"));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Fixed test rows scored against probabilities from `reference` only.
fn fixed_test_experiment(reference: Dataset, test: &[(&str, &str)], dir: &Path) -> Experiment {
    let test_rows = test.iter().map(|(actual, _)| (vec!["U-test".into(), "read".into()], *actual)).collect();
    let test_data = dataset(test_rows, &["user", "activity"]);
    let predicted: Vec<&str> = test.iter().map(|(_, p)| *p).collect();
    let preds = write_predictions(dir, "model.csv", &predicted);
    let config = RunConfig {
        excluded: vec!["user".into()],
        prob_source: ProbabilitySource::Train,
        models: vec![ModelSpec::Predictions(preds)],
        include_samples: true,
        ..RunConfig::new("in-memory")
    };
    Experiment::new(config, reference, Some(test_data)).unwrap()
}

const D0: [&str; 10] = ["LA", "LA", "LA", "LA", "LB", "LB", "LB", "LB", "LC", "LC"];

#[test]
fn table1_rows_replayed_through_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let rows = [("LA", "LA"), ("LB", "LC"), ("LC", "LA"), ("LA", "LB"), ("LB", "LB")];
    let exp = fixed_test_experiment(single_context(&D0), &rows, dir.path());
    let (_, report) = exp.evaluate().unwrap().reports.remove(0);
    assert_eq!(report.ca, 40.0);

    // Independent per-row scores with P = {LA: .4, LB: .4, LC: .2}, (2, 1).
    let expected = [100.0, 100.0 - 20.0, 100.0 - 20.0 / 3.0, 100.0, 100.0];
    let samples = report.samples.as_ref().unwrap();
    for (s, e) in samples.iter().zip(expected) {
        assert_abs_diff_eq!(s.score, e, epsilon = 1e-9);
    }
    assert_abs_diff_eq!(report.rs, expected.iter().sum::<f64>() / 5.0, epsilon = 1e-9);
    assert_eq!(report.case_count(Case::Case1), 2);
    assert_eq!(report.case_count(Case::Case5), 1);
    assert_eq!(report.case_count(Case::Case2), 1);
    assert_eq!(report.case_count(Case::CaseOther), 1);
    assert_eq!(report.provenance["probability_source"], "train");
}

#[test]
fn single_exact_match() {
    let dir = tempfile::tempdir().unwrap();
    let exp = fixed_test_experiment(single_context(&D0), &[("LB", "LB")], dir.path());
    let (_, r) = exp.evaluate().unwrap().reports.remove(0);
    assert_eq!((r.rs, r.ca), (100.0, 100.0));
    assert_eq!(r.case_count(Case::Case1), 1);
    assert_eq!(r.cases.values().sum::<u64>(), 1);
}

#[test]
fn sweep_all_matches_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let exp = fixed_test_experiment(single_context(&D0), &[("LA", "LA"), ("LC", "LC")], dir.path());
    let rows = exp.sweep(&SweepSpec::default()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.rs == 100.0));
}

#[test]
fn sweep_equal_distances_is_flat() {
    // Predict LC (0.2) where LA (0.4, the mode) happened: d_hp = d_pa = 0.2.
    let dir = tempfile::tempdir().unwrap();
    let exp = fixed_test_experiment(single_context(&D0), &[("LA", "LC")], dir.path());
    let spec = SweepSpec {
        pairs: SweepSpec::parse_pairs("2:1,1:1,1:2,5:3").unwrap(),
        include_limits: true,
    };
    let rows = exp.sweep(&spec).unwrap();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_abs_diff_eq!(r.rs, 80.0, epsilon = 1e-9);
    }
    let csv = sweep_csv(&rows);
    assert!(csv.contains("model,inf,1,80.000000"));
    assert!(csv.contains("model,1,inf,80.000000"));
}

#[test]
fn sweep_rewards_the_smaller_distance() {
    // P = {A: .5, B: .2, C: .1, D: .2}; predict B, actual C: d_hp = .3, d_pa = .1.
    let outcomes = ["A", "A", "A", "A", "A", "B", "B", "C", "D", "D"];
    let dir = tempfile::tempdir().unwrap();
    let exp = fixed_test_experiment(single_context(&outcomes), &[("C", "B")], dir.path());
    let spec = SweepSpec {
        pairs: SweepSpec::parse_pairs("4:1,2:1,1:1,1:2,1:4").unwrap(),
        include_limits: false,
    };
    let rs: Vec<f64> = exp.sweep(&spec).unwrap().iter().map(|r| r.rs).collect();
    assert!(rs.windows(2).all(|w| w[1] > w[0]), "{rs:?}");
    // (2, 1): err = (0.6 + 0.1) / 3.
    assert_abs_diff_eq!(rs[1], 100.0 * (1.0 - 0.7 / 3.0), epsilon = 1e-9);
}

#[test]
fn bounds_examples() {
    // P = {A: .5, B: .3, C: .2}; predict B, actual C: d_hp = .2, d_pa = .1.
    let outcomes = ["A", "A", "A", "A", "A", "B", "B", "B", "C", "C"];
    let dir = tempfile::tempdir().unwrap();
    let exp = fixed_test_experiment(single_context(&outcomes), &[("C", "B")], dir.path());
    let row = exp.bounds().unwrap().remove(0);
    assert_abs_diff_eq!(row.rs_alpha_inf, 80.0, epsilon = 1e-9);
    assert_abs_diff_eq!(row.rs_beta_inf, 90.0, epsilon = 1e-9);
    assert!(row.converged());

    let spec = SweepSpec {
        pairs: SweepSpec::parse_pairs("9:1,2:1,1:1,1:2,1:9,0:1,1:0").unwrap(),
        include_limits: false,
    };
    for r in exp.sweep(&spec).unwrap() {
        assert!(r.rs >= 80.0 - 1e-9 && r.rs <= 90.0 + 1e-9);
    }

    let dir = tempfile::tempdir().unwrap();
    let exp = fixed_test_experiment(single_context(&outcomes), &[("A", "A"), ("B", "B")], dir.path());
    let row = exp.bounds().unwrap().remove(0);
    assert_eq!((row.rs_alpha_inf, row.rs_beta_inf), (100.0, 100.0));
}

#[test]
fn zero_weights_equal_the_limits() {
    let outcomes = ["A", "A", "A", "A", "A", "B", "B", "B", "C", "C"];
    let dir = tempfile::tempdir().unwrap();
    let exp = fixed_test_experiment(single_context(&outcomes), &[("C", "B")], dir.path());
    let spec = SweepSpec {
        pairs: SweepSpec::parse_pairs("1:0,0:1").unwrap(),
        include_limits: true,
    };
    let rows = exp.sweep(&spec).unwrap();
    assert_abs_diff_eq!(rows[0].rs, rows[2].rs, epsilon = 1e-12);
    assert_eq!(rows[2].point, SweepPoint::AlphaLimit);
    assert_abs_diff_eq!(rows[1].rs, rows[3].rs, epsilon = 1e-12);
}

/// Eight presets, six categorical features, user identity drives nothing.
fn lighting_like(m: usize, deterministic: bool) -> Dataset {
    let presets: Vec<String> = (0..8).map(|i| format!("preset{i}")).collect();
    let rows = (0..m)
        .map(|i| {
            let activity = i % 4;
            let area = (i / 4) % 2;
            let values = vec![
                format!("user{}", i % 5),
                format!("activity{activity}"),
                format!("area{area}"),
                format!("users{}", (i / 8) % 2),
                "day".to_string(),
                "sunny".to_string(),
            ];
            let outcome = if deterministic { activity * 2 + area } else { (i * 7 + i / 3) % 8 };
            (values, presets[outcome].as_str())
        })
        .collect::<Vec<_>>();
    let mut data = dataset(rows, &["user", "activity", "area", "users", "time", "external"]);
    data.schema = data.schema.with_labels(presets.iter().map(|p| label(p)));
    data
}

#[test]
fn deterministic_contexts_give_perfect_scores_for_most_probable() {
    let config = RunConfig {
        excluded: vec!["user".into()],
        models: vec![ModelSpec::Baseline(PredictorKind::MostProbable)],
        ..RunConfig::new("in-memory")
    };
    let exp = Experiment::new(config, lighting_like(200, true), None).unwrap();
    let (_, r) = exp.evaluate().unwrap().reports.remove(0);
    assert_eq!((r.ca, r.rs), (100.0, 100.0));
}

#[test]
fn random_control_separates_structured_from_randomized() {
    let config = RunConfig {
        excluded: vec!["user".into()],
        models: PredictorKind::ALL.iter().map(|&k| ModelSpec::Baseline(k)).collect(),
        split: SplitSpec { seed: 11, ..Default::default() },
        ..RunConfig::new("in-memory")
    };
    let exp = Experiment::new(config, lighting_like(2000, true), None).unwrap();
    let control = exp.random_control().unwrap();
    assert_eq!(control.alphabet_size, 8);
    let real = &control.real.reports[0].1;
    let randomized = &control.randomized.reports[0].1;
    assert_eq!(control.real.reports[0].0, "most-probable");
    assert!(real.rs > randomized.rs);
    assert_eq!(randomized.provenance["arm"], "randomized");
    for ((_, r), check) in control.randomized.reports.iter().zip(&control.checks) {
        assert!(r.rs >= r.ca);
        assert_eq!(check.expected_ca, 12.5);
        assert!(check.within(4.0), "{check:?}");
    }
}

#[test]
fn train_only_source_is_recorded_and_differs() {
    let base = RunConfig {
        excluded: vec!["user".into()],
        models: vec![ModelSpec::Baseline(PredictorKind::OneRule)],
        split: SplitSpec { shuffle_count: 3, seed: 5, ..Default::default() },
        ..RunConfig::new("in-memory")
    };
    let train_cfg = RunConfig { prob_source: ProbabilitySource::Train, ..base.clone() };
    let full = Experiment::new(base, lighting_like(120, false), None).unwrap().evaluate().unwrap();
    let train = Experiment::new(train_cfg, lighting_like(120, false), None).unwrap().evaluate().unwrap();
    assert_eq!(full.reports[0].1.provenance["probability_source"], "full");
    assert_eq!(train.reports[0].1.provenance["probability_source"], "train");
    assert_eq!(full.reports[0].1.ca, train.reports[0].1.ca);
}

#[test]
fn unseen_error_policy_is_attributed_to_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let reference = single_context(&D0);
    let test_rows = vec![(vec!["U9".to_string(), "sleep".to_string()], "LA")];
    let test = dataset(test_rows, &["user", "activity"]);
    let preds = write_predictions(dir.path(), "ext.csv", &["LA"]);
    let config = RunConfig {
        excluded: vec!["user".into()],
        prob_source: ProbabilitySource::Train,
        unseen: UnseenPolicy::Error,
        models: vec![ModelSpec::Predictions(preds)],
        ..RunConfig::new("in-memory")
    };
    let err = Experiment::new(config, reference, Some(test)).unwrap().evaluate().unwrap_err();
    assert!(err.to_string().starts_with("model `ext`"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn prediction_files_per_shuffle() {
    let dir = tempfile::tempdir().unwrap();
    let data = lighting_like(20, true);
    let spec = SplitSpec { shuffle_count: 2, seed: 3, ..Default::default() };
    for shuffle in 0..2 {
        let s = split(data.samples.len(), &spec, shuffle).unwrap();
        let truth: Vec<&str> = s.test.iter().map(|&i| data.samples[i].outcome.as_str()).collect();
        write_predictions(dir.path(), &format!("oracle-{shuffle}.csv"), &truth);
    }
    let config = RunConfig {
        excluded: vec!["user".into()],
        split: spec,
        models: vec![ModelSpec::Predictions(dir.path().join("oracle-{shuffle}.csv"))],
        ..RunConfig::new("in-memory")
    };
    let out = Experiment::new(config, data, None).unwrap().evaluate().unwrap();
    let (name, r) = &out.reports[0];
    assert_eq!(name, "oracle");
    assert_eq!((r.ca, r.rs), (100.0, 100.0));
}
