//! Accuracy against relevance on a five-row test set.
//!
//! A user picked LA four times, LB four times and LC twice in the same
//! observed context. Accuracy only counts exact hits; the relevance score
//! gives partial credit according to how probable each choice was.
//!
//! ```bash
//! cargo run -p relevance-score --example table1_replay
//! ```

use relevance_score::prelude::*;

fn main() -> relevance_score::Result<()> {
    let l = |s: &str| OutcomeLabel::new(s).unwrap();
    let schema = FeatureSchema::new(vec!["user".into(), "activity".into()], "preset")?;
    let history: Vec<Sample> = ["LA", "LA", "LA", "LA", "LB", "LB", "LB", "LB", "LC", "LC"]
        .iter()
        .enumerate()
        .map(|(i, o)| Sample::new([format!("user{i}"), "reading".into()], l(o)))
        .collect();
    let table = DistributionTable::build(&history, &["user"], &schema, ProbabilitySource::Full)?;
    let context = table.lookup_sample(&history[0], UnseenPolicy::Error)?;
    println!("P(y | reading): {:?}\n", context.probabilities());

    let actual = ["LA", "LB", "LC", "LA", "LB"].map(l);
    let predicted = ["LA", "LC", "LA", "LB", "LB"].map(l);
    let params = RsParams::default();

    println!("{:<7}{:<10}{:>5}{:>9}  case", "actual", "predicted", "CA", "score");
    let evals: Vec<SampleEvaluation> = actual
        .iter()
        .zip(&predicted)
        .map(|(a, p)| {
            let e = score_sample(p, a, context, &params);
            let hit = if a == p { 100 } else { 0 };
            println!("{a:<7}{p:<10}{hit:>5}{:>9.2}  {} ({})", e.score, e.case, e.case.description());
            e
        })
        .collect();

    println!();
    println!("CA = {:.2}", classification_accuracy(&predicted, &actual)?);
    println!("RS = {:.2}  (alpha = {}, beta = {})", relevance_score(&evals)?, params.alpha(), params.beta());
    Ok(())
}
