use std::collections::BTreeMap;

use proptest::prelude::*;
use relevance_score::baselines::{Predictor, PredictorKind};
use relevance_score::io::{case_histogram, EvaluationReport};
use relevance_score::metric::{accuracy_of, evaluate_probabilities, mean_score};
use relevance_score::prelude::*;

fn label(s: &str) -> OutcomeLabel {
    OutcomeLabel::new(s).unwrap()
}

const LABELS: [&str; 3] = ["LA", "LB", "LC"];

/// Rows over two features (`user` with 3 values, `ctx` with up to 4) and 3
/// labels.
fn toy_rows(max_rows: usize) -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
    prop::collection::vec((0..3usize, 0..4usize, 0..3usize), 1..=max_rows)
}

fn to_samples(rows: &[(usize, usize, usize)]) -> Vec<Sample> {
    rows.iter()
        .map(|&(u, c, y)| Sample::new([format!("u{u}"), format!("c{c}")], label(LABELS[y])))
        .collect()
}

fn schema() -> FeatureSchema {
    FeatureSchema::new(vec!["user".into(), "ctx".into()], "y").unwrap()
}

fn params() -> impl Strategy<Value = RsParams> {
    (0.0..50.0f64, 0.0..50.0f64)
        .prop_filter("alpha + beta > 0", |(a, b)| a + b > 1e-6)
        .prop_map(|(a, b)| RsParams::new(a, b).unwrap())
}

/// A valid probability triple: the mode is the largest of the three.
fn triple() -> impl Strategy<Value = ProbabilityTriple> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(h, p, a)| {
        let h = h.max(p).max(a);
        ProbabilityTriple::new(h, p, a).unwrap()
    })
}

proptest! {
    #[test]
    fn scores_stay_in_range(probs in triple(), params in params(), same in any::<bool>()) {
        let actual = if same { label("LA") } else { label("LB") };
        let e = evaluate_probabilities(&label("LA"), &actual, probs, &params);
        prop_assert!((0.0..=1.0).contains(&e.err_score));
        prop_assert!((0.0..=100.0).contains(&e.score));
        prop_assert_eq!(e.score, (1.0 - e.err_score) * 100.0);
        if same {
            prop_assert_eq!(e.score, 100.0);
        }
    }

    #[test]
    fn distances_are_bounded_and_triangular(probs in triple()) {
        let d = distances(&probs);
        for v in [d.d_hp, d.d_pa, d.d_ha] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(d.d_ha <= d.d_hp + d.d_pa + 1e-15);
    }

    #[test]
    fn err_score_is_scale_invariant(probs in triple(), params in params(), c in 1e-3..1e3f64) {
        let d = distances(&probs);
        let scaled = RsParams::new(params.alpha() * c, params.beta() * c).unwrap();
        prop_assert!((err_score(&d, &params) - err_score(&d, &scaled)).abs() <= 1e-12);
    }

    #[test]
    fn rs_dominates_ca(rows in toy_rows(20), preds in prop::collection::vec(0..3usize, 20), params in params()) {
        let data = to_samples(&rows);
        let table = DistributionTable::build(&data, &["user"], &schema(), ProbabilitySource::Full).unwrap();
        let evals: Vec<SampleEvaluation> = data.iter().zip(&preds).map(|(s, &p)| {
            let dist = table.lookup_sample(s, UnseenPolicy::Error).unwrap();
            score_sample(&label(LABELS[p]), &s.outcome, dist, &params)
        }).collect();
        let rs = relevance_score(&evals).unwrap();
        let ca = accuracy_of(&evals).unwrap();
        prop_assert!(rs + 1e-9 >= ca);
        prop_assert!((0.0..=100.0 + 1e-9).contains(&rs));
        let (lo, hi) = {
            let a = rs_limit_alpha(&evals).unwrap();
            let b = rs_limit_beta(&evals).unwrap();
            (a.min(b), a.max(b))
        };
        prop_assert!(rs >= lo - 1e-9 && rs <= hi + 1e-9);
    }

    #[test]
    fn mode_dominates_and_ties_do_not_matter(rows in toy_rows(20), p in 0..3usize, a in 0..3usize) {
        let data = to_samples(&rows);
        let table = DistributionTable::build(&data, &["user"], &schema(), ProbabilitySource::Full).unwrap();
        for dist in table.entries() {
            let (pred, act) = (label(LABELS[p]), label(LABELS[a]));
            prop_assert!(dist.mode_probability() >= dist.probability(&pred));
            prop_assert!(dist.mode_probability() >= dist.probability(&act));
            // Any label tied with the mode yields the same score.
            let base = score_sample(&pred, &act, dist, &RsParams::default());
            for tied in dist.probabilities().iter().filter(|(_, &q)| q == dist.mode_probability()) {
                let probs = ProbabilityTriple::new(*tied.1, dist.probability(&pred), dist.probability(&act)).unwrap();
                let alt = evaluate_probabilities(&pred, &act, probs, &RsParams::default());
                prop_assert_eq!(alt.score, base.score);
                prop_assert_eq!(alt.distances.d_hp, base.distances.d_hp);
            }
        }
    }

    #[test]
    fn table_is_permutation_invariant_and_conserves_counts(rows in toy_rows(20), seed in any::<u64>()) {
        let data = to_samples(&rows);
        let mut shuffled = data.clone();
        use rand::{seq::SliceRandom, SeedableRng};
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = DistributionTable::build(&data, &["user"], &schema(), ProbabilitySource::Full).unwrap();
        let b = DistributionTable::build(&shuffled, &["user"], &schema(), ProbabilitySource::Full).unwrap();
        prop_assert_eq!(&a, &b);
        let total: u64 = a.entries().map(|d| d.total()).sum();
        prop_assert_eq!(total as usize, data.len());
        for dist in a.entries() {
            let sum: f64 = dist.probabilities().values().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            for (l, &p) in dist.probabilities() {
                prop_assert!((p - dist.count(l) as f64 / dist.total() as f64).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn excluding_more_features_never_adds_contexts(rows in toy_rows(20)) {
        let data = to_samples(&rows);
        let none: [&str; 0] = [];
        let sizes: Vec<usize> = [&none[..], &["user"][..], &["user", "ctx"][..]]
            .iter()
            .map(|ex| DistributionTable::build(&data, ex, &schema(), ProbabilitySource::Full).unwrap().len())
            .collect();
        prop_assert!(sizes[0] >= sizes[1] && sizes[1] >= sizes[2]);
        prop_assert_eq!(sizes[2], 1);
    }

    /// Brute force over every context -> label map on the training rows.
    #[test]
    fn most_probable_maximizes_training_accuracy(rows in toy_rows(20)) {
        let data = to_samples(&rows);
        let schema = schema();
        let projection = ContextProjection::new(&schema, &["user"]).unwrap();
        let mut p = Predictor::fit(PredictorKind::MostProbable, &data, &projection, &schema, 0).unwrap();
        let predicted = p.predict(&data).unwrap();
        let actual: Vec<OutcomeLabel> = data.iter().map(|s| s.outcome.clone()).collect();
        let ca = classification_accuracy(&predicted, &actual).unwrap();

        let contexts: Vec<usize> = rows.iter().map(|r| r.1).collect();
        let mut best = 0.0f64;
        for code in 0..81usize {
            let assign = |c: usize| (code / 3usize.pow(c as u32)) % 3;
            let hits = rows.iter().zip(&contexts).filter(|(r, &c)| r.2 == assign(c)).count();
            best = best.max(100.0 * hits as f64 / rows.len() as f64);
        }
        prop_assert!((ca - best).abs() <= 1e-12);
    }

    #[test]
    fn report_json_round_trips(ca in 0.0..=100.0f64, rs in 0.0..=100.0f64, a in 0.0..=100.0f64, b in 0.0..=100.0f64, params in params()) {
        let report = EvaluationReport {
            ca, rs, alpha: params.alpha(), beta: params.beta(), rs_alpha_inf: a, rs_beta_inf: b,
            cases: case_histogram(std::iter::empty()),
            provenance: BTreeMap::from([("model".to_string(), "m".to_string())]),
            samples: None,
        };
        let back: EvaluationReport = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, report);
    }
}

#[test]
fn exactly_uniform_context_scores_full() {
    let schema = schema();
    let data: Vec<Sample> = LABELS
        .iter()
        .map(|l| Sample::new(["u0", "c0"], label(l)))
        .collect();
    let table = DistributionTable::build(&data, &["user"], &schema, ProbabilitySource::Full).unwrap();
    let dist = table.entries().next().unwrap();
    for p in LABELS {
        for a in LABELS {
            let e = score_sample(&label(p), &label(a), dist, &RsParams::default());
            assert_eq!((e.distances.d_hp, e.distances.d_pa, e.distances.d_ha), (0.0, 0.0, 0.0));
            assert_eq!(e.score, 100.0);
        }
    }
}

#[test]
fn score_sample_examples() {
    let schema = schema();
    let data: Vec<Sample> = ["LA", "LA", "LA", "LA", "LB", "LB", "LB", "LB", "LC", "LC"]
        .iter()
        .enumerate()
        .map(|(i, o)| Sample::new([format!("u{i}"), "c0".into()], label(o)))
        .collect();
    let table = DistributionTable::build(&data, &["user"], &schema, ProbabilitySource::Full).unwrap();
    let d0 = table.entries().next().unwrap();
    let p = RsParams::default();
    let scores = [
        score_sample(&label("LB"), &label("LB"), d0, &p).score,
        score_sample(&label("LA"), &label("LB"), d0, &p).score,
        score_sample(&label("LC"), &label("LA"), d0, &p).score,
    ];
    assert_eq!(scores[0], 100.0);
    assert_eq!(scores[1], 100.0);
    assert!((scores[2] - 80.0).abs() < 1e-12);
    assert_eq!(score_sample(&label("LA"), &label("LB"), d0, &p).case, Case::CaseOther);
    assert!((mean_score(&scores).unwrap() - 280.0 / 3.0).abs() < 1e-12);
}
