//! Building conditional outcome distributions and choosing what to exclude.
//!
//! ```bash
//! cargo run -p relevance-score --example distribution_table
//! ```

mod common;

use relevance_score::prelude::*;

fn main() -> relevance_score::Result<()> {
    let data = common::lighting(400, 0.6, 7);

    for excluded in [vec![], vec!["user"], vec!["user", "external", "users", "area"]] {
        let table = DistributionTable::build(&data.samples, &excluded, &data.schema, ProbabilitySource::Full)?;
        let mean_support: f64 =
            table.entries().map(|d| d.support_size() as f64).sum::<f64>() / table.len() as f64;
        println!(
            "excluding {:<36} {:>4} contexts, mean support {:.2} of {}",
            format!("{excluded:?}"),
            table.len(),
            mean_support,
            table.alphabet().len()
        );
    }

    let table = DistributionTable::build(&data.samples, &["user", "external", "users", "area"], &data.schema, ProbabilitySource::Full)?;
    let busiest = table.entries().max_by_key(|d| d.total()).expect("non-empty table");
    println!("\nbusiest context {} ({} rows), mode {}:", busiest.context(), busiest.total(), busiest.mode());
    for (label, p) in busiest.probabilities().iter().filter(|(_, &p)| p > 0.0) {
        println!("  {label:<22}{p:.3}");
    }

    let unseen = ContextKey(vec!["nap".into(), "midnight".into()]);
    for policy in [UnseenPolicy::Uniform, UnseenPolicy::Marginal, UnseenPolicy::Error] {
        match table.lookup(&unseen, policy) {
            Ok(d) => println!("unseen context, {:<8} policy -> mode {} at {:.3}", policy.as_str(), d.mode(), d.mode_probability()),
            Err(e) => println!("unseen context, {:<8} policy -> {e}", policy.as_str()),
        }
    }
    Ok(())
}
