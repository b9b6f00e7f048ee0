//! Relevance score of each baseline across (alpha, beta) weightings.
//!
//! ```bash
//! cargo run -p relevance-score --example alpha_beta_sweep
//! ```

mod common;

use relevance_score::experiments::{sweep_csv, SweepSpec};
use relevance_score::prelude::*;

fn main() -> relevance_score::Result<()> {
    let config = RunConfig {
        excluded: vec!["user".into()],
        models: common::baselines(),
        split: SplitSpec { seed: 1, ..Default::default() },
        ..RunConfig::new("synthetic")
    };
    let experiment = Experiment::new(config, common::lighting(236, 0.5, 3), None)?;
    let spec = SweepSpec {
        pairs: SweepSpec::parse_pairs("4:1,2:1,1:1,1:2,1:4")?,
        include_limits: true,
    };
    print!("{}", sweep_csv(&experiment.sweep(&spec)?));
    Ok(())
}
