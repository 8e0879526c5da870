//! One module per named experiment. Each reads its keys from the config,
//! echoes the resolved values, and records checks against fixed tolerances.

mod complex_structure;
mod covariant_propagator;
mod fock_ccr;
mod hs_scan;
mod linear_evolve;
mod metric_suite;
mod moyal_covariance;
mod phi4_evolve;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::output::Output;
use crate::report::RunReport;

pub fn run(experiment: Experiment, config: &ExperimentConfig, out: &Output) -> Result<RunReport, CliError> {
    let mut report = RunReport::new(experiment.name(), config.seed());
    match experiment {
        Experiment::LinearEvolve => linear_evolve::run(config, out, &mut report)?,
        Experiment::ComplexStructure => complex_structure::run(config, &mut report)?,
        Experiment::FockCcr => fock_ccr::run(config, out, &mut report)?,
        Experiment::HsScan => hs_scan::run(config, out, &mut report)?,
        Experiment::Phi4Evolve => phi4_evolve::run(config, out, &mut report)?,
        Experiment::MoyalCovariance => moyal_covariance::run(config, out, &mut report)?,
        Experiment::CovariantPropagator => covariant_propagator::run(config, out, &mut report)?,
        Experiment::MetricSuite => metric_suite::run(config, out, &mut report)?,
    }
    Ok(report)
}

/// Row stride keeping trajectory dumps near `max_rows` lines.
fn stride(len: usize, max_rows: usize) -> usize {
    len.div_ceil(max_rows).max(1)
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}
