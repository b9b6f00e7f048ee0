//! Real outputs against outputs drawn from an eight-sided die.
//!
//! ```bash
//! cargo run -p relevance-score --example random_output_control
//! ```

mod common;

use relevance_score::prelude::*;

fn main() -> relevance_score::Result<()> {
    let config = RunConfig {
        excluded: vec!["user".into()],
        models: common::baselines(),
        split: SplitSpec { seed: 9, ..Default::default() },
        ..RunConfig::new("synthetic")
    };
    let experiment = Experiment::new(config, common::lighting(2000, 0.8, 5), None)?;
    let control = experiment.random_control()?;

    println!("{:<16}{:>10}{:>10}{:>14}{:>14}", "model", "real CA", "real RS", "random CA", "random RS");
    for ((model, real), (_, random)) in control.real.reports.iter().zip(&control.randomized.reports) {
        println!("{model:<16}{:>10.2}{:>10.2}{:>14.2}{:>14.2}", real.ca, real.rs, random.ca, random.rs);
    }
    for check in &control.checks {
        println!(
            "{:<16} random CA {:.2} vs chance {:.2} (+/- {:.2} at 3 s.e.)",
            check.model,
            check.ca,
            check.expected_ca,
            3.0 * check.standard_error
        );
    }
    Ok(())
}
