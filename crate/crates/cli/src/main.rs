//! `phasefield`: run one named experiment and write `report.json` plus its CSVs.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or output
//! cannot be written, 2 for configuration errors, 3 when a numerical guard
//! trips.

mod config;
mod error;
mod experiments;
mod output;
mod report;
mod sampling;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::output::Output;

#[derive(Debug, Parser)]
#[command(name = "phasefield", version, about = "Run a phasefield experiment")]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,

    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (default `phasefield-out/<experiment>`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for every random sample.
    #[arg(long)]
    seed: Option<u64>,

    /// `key=value` config override; dotted keys reach into objects.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let config =
        ExperimentConfig::load(cli.experiment, cli.config.as_deref(), &cli.overrides, cli.seed, cli.out.as_deref())?;
    let out = Output::create(&config.out_dir(cli.experiment))?;
    let start = Instant::now();
    let report = experiments::run(cli.experiment, &config, &out)?;
    out.write_atomic("report.json", report.to_json().render().as_bytes())?;
    // timing stays out of the report so identical configs give identical bytes
    eprintln!(
        "{}: {} in {:.2}s, report at {}",
        cli.experiment,
        if report.passed() { "passed" } else { "FAILED" },
        start.elapsed().as_secs_f64(),
        out.dir().join("report.json").display()
    );
    for name in report.failed_checks() {
        eprintln!("  failed check: {name}");
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
