use phasefield::complex_structure::{induced_inner_product, polar_complex_structure, positive_frequency_split};
use phasefield::lattice::SpatialLattice;
use phasefield::linalg::max_abs;
use phasefield::linear_dynamics::{build_generator, evolve_linear, QuadraticHamiltonian};

use super::max_of;
use crate::config::{non_negative, positive, ExperimentConfig};
use crate::error::CliError;
use crate::report::RunReport;
use crate::sampling;

/// Polar and positive-frequency complex structures of a Klein–Gordon chain,
/// compared against each other and against their defining invariants.
pub fn run(config: &ExperimentConfig, report: &mut RunReport) -> Result<(), CliError> {
    let a = positive("a", config.a.unwrap_or(1.0))?;
    let m = non_negative("m", config.m.unwrap_or(1.0))?;
    let t = config.t.unwrap_or(1.0);
    let lattice = config.lattice_or(|| SpatialLattice::uniform(16, a))?;
    report.param("lattice", serde_json::to_value(lattice.spec()).expect("spec serializes"));
    report.param("a", a);
    report.param("m", m);
    report.param("t", t);

    let h = QuadraticHamiltonian::klein_gordon_chain(lattice.clone(), m, a)?;
    let gen = build_generator(&h)?;
    let polar = polar_complex_structure(&gen)?;
    let split = positive_frequency_split(&gen)?;
    let invariants = polar.report();

    report.at_most("polar_vs_split", max_abs(&(polar.matrix() - split.jtilde().matrix())), 1e-10);
    report.at_most("j_squared_plus_one", invariants.complex.residual, 1e-12);
    report.at_most("j_symplectic", invariants.symplectic.residual, 1e-12);
    report.holds("j_positive", invariants.positive.passed);
    report.at_most("projector_idempotency", split.idempotency_residual(), 1e-12);
    report.at_most("evolution_commutator", polar.commutator_residual(&evolve_linear(&gen, t)), 1e-10);

    let mut rng = sampling::rng(config.seed());
    let mut gaps = Vec::new();
    for _ in 0..10 {
        let x = sampling::phase_vector(&mut rng, &lattice, 1.0);
        let y = sampling::phase_vector(&mut rng, &lattice, 1.0);
        gaps.push((induced_inner_product(&polar, &x, &y)? - split.projected_inner_product(&x, &y)?).norm());
    }
    report.at_most("inner_product_vs_projection", max_of(gaps), 1e-10);
    report.value("complex_dimension", polar.complex_dimension());
    report.value("positivity_shortfall", invariants.positive.residual);
    Ok(())
}
