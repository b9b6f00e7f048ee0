//! Scoring an external classifier: export the shuffled splits, let another
//! tool predict, then evaluate its `index,predicted` files.
//!
//! ```bash
//! cargo run -p relevance-score --example external_predictions
//! ```

mod common;

use std::fs;

use relevance_score::experiments::write_dataset;
use relevance_score::prelude::*;

fn main() -> relevance_score::Result<()> {
    let dir = std::env::temp_dir().join("relevance-score-external");
    fs::create_dir_all(&dir).map_err(|source| relevance_score::Error::Io { path: dir.clone(), source })?;
    let data = common::lighting(300, 0.7, 11);
    let dataset_path = dir.join("lighting.csv");
    write_dataset(&dataset_path, data.schema.features(), data.schema.outcome_column(), &data.samples)?;

    let spec = SplitSpec { shuffle_count: 3, seed: 42, ..Default::default() };
    for shuffle in 0..spec.shuffle_count {
        let s = split(data.samples.len(), &spec, shuffle)?;
        // Stand-in for an external tool: always answer "static-warm-dim"
        // except for reading, where it guesses the activity default.
        let mut text = String::from("index,predicted\n");
        for (i, row) in s.test_samples(&data.samples).iter().enumerate() {
            let guess = if row.values[1] == "read" { common::PRESETS[0] } else { common::PRESETS[1] };
            text.push_str(&format!("{i},{guess}\n"));
        }
        let path = dir.join(format!("external-{shuffle}.csv"));
        fs::write(&path, text).map_err(|source| relevance_score::Error::Io { path, source })?;
    }

    let config = RunConfig {
        excluded: vec!["user".into()],
        split: spec,
        models: vec![
            ModelSpec::Predictions(dir.join("external-{shuffle}.csv")),
            ModelSpec::Baseline(PredictorKind::MostProbable),
        ],
        include_samples: true,
        ..RunConfig::new(&dataset_path)
    };
    let output = Experiment::load(config)?.evaluate()?;
    print!("{}", output.comparison_csv());

    let report_path = dir.join("external.json");
    write_report(&output.reports[0].1, &report_path, ReportFormat::Json)?;
    let back = read_report(&report_path)?;
    println!("\nwrote {} ({} per-sample records)", report_path.display(), back.samples.map_or(0, |s| s.len()));
    Ok(())
}
