use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relevance_score::experiments::{bounds_csv, sweep_csv, EvaluateOutput, Experiment, ModelSpec, RunConfig, SweepSpec};
use relevance_score::io::{tagged_path, write_report, DatasetOptions, ReportFormat};
use relevance_score::metric::{OutcomeLabel, RsParams};
use relevance_score::prelude::SplitSpec;
use relevance_score::{Error, Result};

#[derive(Parser)]
#[command(name = "rscore", version, about = "Relevance Score and Classification Accuracy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CA and RS per model, averaged over shuffles.
    Evaluate(Common),
    /// RS over a list of (alpha, beta) pairs.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1:2,1:1,2:1")]
        pairs: String,
        /// Also emit the alpha -> inf and beta -> inf rows.
        #[arg(long)]
        limits: bool,
    },
    /// Limit bounds of RS as alpha or beta grows without bound.
    Bounds(Common),
    /// Real outputs against uniformly randomized outputs.
    RandomControl(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    dataset: PathBuf,
    /// Fixed evaluation rows instead of shuffled splits.
    #[arg(long)]
    test_dataset: Option<PathBuf>,
    /// Features removed from the context, comma separated.
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<String>,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Prediction file `index,predicted`; `{shuffle}` in the path is replaced
    /// by the shuffle index. Repeatable.
    #[arg(long = "predict-file")]
    predict_files: Vec<PathBuf>,
    /// most-probable, uniform-random, marginal-random or one-rule. Repeatable.
    #[arg(long = "baseline", value_delimiter = ',')]
    baselines: Vec<String>,
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    #[arg(long, default_value_t = 10)]
    shuffles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "full")]
    prob_source: String,
    #[arg(long, default_value = "uniform")]
    unseen: String,
    /// Outcome column name (default: last column).
    #[arg(long)]
    outcome: Option<String>,
    #[arg(long, default_value = ",")]
    delimiter: char,
    /// Labels that belong to the alphabet even if never observed.
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
    /// Include per-sample records in reports.
    #[arg(long)]
    samples: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        if !self.delimiter.is_ascii() {
            return Err(Error::Config("delimiter must be a single ASCII character".into()));
        }
        let mut models = self
            .baselines
            .iter()
            .map(|b| Ok(ModelSpec::Baseline(b.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        models.extend(self.predict_files.iter().cloned().map(ModelSpec::Predictions));
        Ok(RunConfig {
            dataset: self.dataset.clone(),
            test_dataset: self.test_dataset.clone(),
            dataset_options: DatasetOptions {
                delimiter: self.delimiter as u8,
                outcome_column: self.outcome.clone(),
                labels: self.labels.iter().map(OutcomeLabel::new).collect::<Result<_>>()?,
            },
            excluded: self.exclude.clone(),
            prob_source: self.prob_source.parse()?,
            unseen: self.unseen.parse()?,
            split: SplitSpec {
                train_fraction: self.train_fraction,
                shuffle_count: self.shuffles,
                seed: self.seed,
            },
            params: RsParams::new(self.alpha, self.beta)?,
            models,
            include_samples: self.samples,
        })
    }

    fn experiment(&self) -> Result<Experiment> {
        Experiment::load(self.config()?)
    }

    fn format(&self) -> Result<ReportFormat> {
        self.format.parse()
    }
}

fn write_table(out: Option<&Path>, text: &str) -> Result<()> {
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

fn write_reports(output: &EvaluateOutput, out: Option<&Path>, format: ReportFormat, arm: Option<&str>) -> Result<()> {
    let Some(base) = out else { return Ok(()) };
    let base = match arm {
        Some(arm) => tagged_path(base, arm),
        None => base.to_path_buf(),
    };
    for (model, report) in &output.reports {
        let path = if output.reports.len() == 1 {
            base.clone()
        } else {
            tagged_path(&base, model)
        };
        write_report(report, &path, format)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate(common) => {
            let output = common.experiment()?.evaluate()?;
            write_reports(&output, common.out.as_deref(), common.format()?, None)?;
            print!("{}", output.comparison_csv());
        }
        Command::Sweep { common, pairs, limits } => {
            let spec = SweepSpec {
                pairs: SweepSpec::parse_pairs(&pairs)?,
                include_limits: limits,
            };
            let rows = common.experiment()?.sweep(&spec)?;
            write_table(common.out.as_deref(), &sweep_csv(&rows))?;
        }
        Command::Bounds(common) => {
            let rows = common.experiment()?.bounds()?;
            write_table(common.out.as_deref(), &bounds_csv(&rows))?;
        }
        Command::RandomControl(common) => {
            let control = common.experiment()?.random_control()?;
            let format = common.format()?;
            write_reports(&control.real, common.out.as_deref(), format, Some("real"))?;
            write_reports(&control.randomized, common.out.as_deref(), format, Some("randomized"))?;
            println!("arm,model,ca,rs,expected_ca,ca_standard_error");
            for (arm, output) in [("real", &control.real), ("randomized", &control.randomized)] {
                for row in output.comparison() {
                    let check = control.checks.iter().find(|c| c.model == row.model);
                    let (expected, se) = match (arm, check) {
                        ("randomized", Some(c)) => (format!("{:.6}", c.expected_ca), format!("{:.6}", c.standard_error)),
                        _ => (String::new(), String::new()),
                    };
                    println!("{arm},{},{:.6},{:.6},{expected},{se}", row.model, row.ca, row.rs);
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
