//! Upper and lower relevance scores reached as one weight dominates.
//!
//! ```bash
//! cargo run -p relevance-score --example limit_bounds
//! ```

mod common;

use relevance_score::experiments::bounds_csv;
use relevance_score::prelude::*;

fn main() -> relevance_score::Result<()> {
    let config = RunConfig {
        excluded: vec!["user".into()],
        models: common::baselines(),
        ..RunConfig::new("synthetic")
    };
    let experiment = Experiment::new(config, common::lighting(236, 0.5, 3), None)?;
    let rows = experiment.bounds()?;
    print!("{}", bounds_csv(&rows));
    for row in &rows {
        println!(
            "{:<16} RS ranges over [{:.2}, {:.2}]",
            row.model,
            row.rs_alpha_inf.min(row.rs_beta_inf),
            row.rs_alpha_inf.max(row.rs_beta_inf)
        );
    }
    Ok(())
}
