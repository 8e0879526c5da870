use num_complex::Complex64;
use phasefield::fock::{
    ccr_residuals, covariance_residual, evolve_quantum, fock_hamiltonian, second_quantize, vacuum_characteristic,
    weyl_relation_residual, FockSpace, FockState, ModeVector,
};
use phasefield::linalg::{hermitian_exp, CMatrix};
use rand_chacha::ChaCha8Rng;

use super::max_of;
use crate::config::{non_negative, ExperimentConfig};
use crate::error::CliError;
use crate::output::{Output, Table};
use crate::report::RunReport;
use crate::sampling;

const PAIRS: usize = 5;

struct Samples {
    pairs: Vec<(ModeVector, ModeVector)>,
    unitary: CMatrix,
}

fn residuals(space: &FockSpace, s: &Samples) -> Result<[(&'static str, f64); 3], CliError> {
    let k = space.cutoff().min(5);
    let mut ccr = Vec::new();
    let mut weyl = Vec::new();
    let mut cov = Vec::new();
    for (eta, psi) in &s.pairs {
        ccr.push(ccr_residuals(space, eta, psi)?.max());
        weyl.push(weyl_relation_residual(space, eta, psi, k)?);
        cov.push(covariance_residual(space, &s.unitary, eta, k)?);
    }
    Ok([("ccr", max_of(ccr)), ("weyl_relation", max_of(weyl)), ("covariance", max_of(cov))])
}

fn draw(rng: &mut ChaCha8Rng, d: usize) -> Samples {
    let pairs = (0..PAIRS).map(|_| (sampling::mode(rng, d, 1.0), sampling::mode(rng, d, 1.0))).collect();
    let unitary = hermitian_exp(&sampling::hermitian(rng, d, 1.0), Complex64::new(0.0, 1.0));
    Samples { pairs, unitary }
}

/// Commutation relations, Weyl relations and second-quantized dynamics on
/// the truncated Fock space of `d` modes.
pub fn run(config: &ExperimentConfig, out: &Output, report: &mut RunReport) -> Result<(), CliError> {
    let d = config.d.unwrap_or(1);
    let n_max = config.n_max.unwrap_or(12);
    let omega = non_negative("omega", config.omega.unwrap_or(1.0))?;
    let t = config.t.unwrap_or(1.0);
    report.param("d", d);
    report.param("N_max", n_max);
    report.param("omega", omega);
    report.param("t", t);

    let space = FockSpace::new(d, n_max)?;
    let mut rng = sampling::rng(config.seed());
    let samples = draw(&mut rng, d);

    let mut table = Table::new(&["d", "N_max", "check_name", "residual"]);
    let mut ladder: Vec<usize> = vec![n_max.div_ceil(4), n_max.div_ceil(2), n_max];
    ladder.retain(|&n| n >= 1);
    ladder.dedup();
    for &n in &ladder {
        let sub = FockSpace::new(d, n)?;
        for (name, value) in residuals(&sub, &samples)? {
            table.push(vec![d.into(), n.into(), name.into(), value.into()]);
        }
    }
    let [(_, ccr), (_, weyl), (_, cov)] = residuals(&space, &samples)?;
    report.at_most("ccr_residual", ccr, 1e-10);
    // the Weyl relations only hold in the cutoff limit, so these are measurements
    report.value("weyl_relation_residual", weyl);
    report.value("covariance_residual", cov);

    // vacuum expectation of W(η) at unit norm
    let unit = ModeVector::unit(d, 0);
    let chi = vacuum_characteristic(&space, &unit)?;
    report.value("vacuum_characteristic_unit_norm", chi.re);
    report.value("vacuum_characteristic_gap", (chi - Complex64::new((-0.25f64).exp(), 0.0)).norm());

    let h = CMatrix::identity(d, d) * Complex64::new(omega, 0.0) + sampling::hermitian(&mut rng, d, 0.5);
    let hf = fock_hamiltonian(&space, &h)?;
    let psi = FockState::new(&space, sampling::state(&mut rng, space.dim()))?;
    let direct = evolve_quantum(&hf, &psi, t)?;
    let lifted = psi.apply(&second_quantize(&space, &hermitian_exp(&h, Complex64::new(0.0, -t)))?);
    report.at_most("fock_dynamics_equivalence", direct.distance(&lifted), 1e-8);
    report.value("fock_dimension", space.dim());

    out.write_csv(report, "fock_residuals.csv", &table)
}
