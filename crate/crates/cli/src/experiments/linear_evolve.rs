use phasefield::lattice::SpatialLattice;
use phasefield::linalg::max_abs;
use phasefield::linear_dynamics::{build_generator, evolve_linear, integrate_hamilton, QuadraticHamiltonian};
use phasefield::symplectic::omega_matrix;

use super::{max_of, stride};
use crate::config::{non_negative, positive, ExperimentConfig};
use crate::error::CliError;
use crate::output::{Output, Table};
use crate::report::RunReport;
use crate::sampling;

/// Klein–Gordon chain: exact flow `exp(tĤ)` on a seeded initial state,
/// cross-checked against Störmer–Verlet.
pub fn run(config: &ExperimentConfig, out: &Output, report: &mut RunReport) -> Result<(), CliError> {
    let a = positive("a", config.a.unwrap_or(1.0))?;
    let m = non_negative("m", config.m.unwrap_or(1.0))?;
    let t = non_negative("t", config.t.unwrap_or(1.0))?;
    let dt = positive("dt", config.dt.unwrap_or(1e-3))?;
    let lattice = config.lattice_or(|| SpatialLattice::uniform(16, a))?;
    report.param("lattice", serde_json::to_value(lattice.spec()).expect("spec serializes"));
    report.param("a", a);
    report.param("m", m);
    report.param("t", t);
    report.param("dt", dt);

    let h = QuadraticHamiltonian::klein_gordon_chain(lattice.clone(), m, a)?;
    let gen = build_generator(&h)?;
    let mut rng = sampling::rng(config.seed());
    let eta = sampling::phase_vector(&mut rng, &lattice, 1.0);
    let x0 = eta.coords();
    let u = evolve_linear(&gen, t);
    let exact = &u * &x0;
    let omega = omega_matrix(&lattice);
    let e0 = h.energy_coords(&x0);

    report.at_most("symplectic_residual", max_abs(&(u.transpose() * &omega * &u - &omega)), 1e-10);
    report.at_most("exact_energy_change", (h.energy_coords(&exact) - e0).abs(), 1e-10 * e0.max(1.0));
    let half = evolve_linear(&gen, t / 2.0);
    report.at_most("group_law_residual", max_abs(&(&half * &half - &u)), 1e-10);

    let traj = integrate_hamilton(&h, &eta, t, dt)?;
    report.value("initial_energy", e0);
    report.value("verlet_endpoint_error", (traj.endpoint() - &exact).amax());
    report.value("verlet_energy_drift", max_of(traj.states.iter().map(|x| (h.energy_coords(x) - e0).abs())));

    let n = lattice.site_count();
    let mut table = Table::new(&["t", "energy", "norm", "phi_0", "phi_mid", "pi_0"]);
    let step = stride(traj.len(), 10_000);
    for (i, (time, x)) in traj.times.iter().zip(&traj.states).enumerate() {
        if i % step == 0 || i + 1 == traj.len() {
            table.push(vec![
                (*time).into(),
                h.energy_coords(x).into(),
                x.norm().into(),
                x[0].into(),
                x[n / 2].into(),
                x[n].into(),
            ]);
        }
    }
    out.write_csv(report, "trajectory.csv", &table)
}
