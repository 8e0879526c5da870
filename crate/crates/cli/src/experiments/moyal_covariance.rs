use num_complex::Complex64;
use phasefield::lattice::SpatialLattice;
use phasefield::moyal::star_covariance_residual;
use phasefield::poly::{Polynomial, PolynomialMap};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::{non_negative, ExperimentConfig};
use crate::error::CliError;
use crate::output::{Output, Table};
use crate::report::RunReport;
use crate::sampling;

/// All monomials of total degree at most `deg` with random complex coefficients.
fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, deg: u32) -> Polynomial {
    let mut terms = Vec::new();
    let mut exps = vec![0u32; nvars];
    loop {
        if exps.iter().sum::<u32>() <= deg {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            terms.push((exps.clone(), c));
        }
        // odometer over exponent vectors in [0, deg]^nvars
        let mut i = 0;
        while i < nvars {
            exps[i] += 1;
            if exps[i] <= deg {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
        if i == nvars {
            return Polynomial::from_terms(nvars, terms);
        }
    }
}

/// `πᵢ ↦ πᵢ + ε φᵢ³` on every site: symplectic for any weights, not linear.
fn cubic_shear(n: usize, eps: f64) -> PolynomialMap {
    let dim = 2 * n;
    let mut comps: Vec<Polynomial> = (0..dim).map(|v| Polynomial::variable(dim, v)).collect();
    for i in 0..n {
        let kick = Polynomial::variable(dim, i).pow(3).scale(Complex64::new(eps, 0.0));
        comps[n + i] = &comps[n + i] + &kick;
    }
    PolynomialMap::new(comps).expect("components share one variable count")
}

/// Sweeps `(f∘U)⋆(g∘U) − (f⋆g)∘U` over degree pairs for a random linear
/// symplectic map and a cubic shear. Linear residuals are checked; the
/// nonlinear ones are measurements.
pub fn run(config: &ExperimentConfig, out: &Output, report: &mut RunReport) -> Result<(), CliError> {
    let max_degree = config.max_degree.unwrap_or(6);
    let epsilon = non_negative("epsilon", config.epsilon.unwrap_or(0.1))?;
    let lattice = config.lattice_or(|| SpatialLattice::uniform(1, 1.0))?;
    report.param("lattice", serde_json::to_value(lattice.spec()).expect("spec serializes"));
    report.param("max_degree", max_degree);
    report.param("epsilon", epsilon);

    let n = lattice.site_count();
    let mut rng = sampling::rng(config.seed());
    let linear = PolynomialMap::linear(&sampling::symplectic_matrix(&mut rng, &lattice, 0.4));
    let shear = cubic_shear(n, epsilon);

    let mut table = Table::new(&["f_degree", "g_degree", "map_name", "epsilon", "residual_max"]);
    let (mut linear_abs, mut linear_rel, mut shear_max) = (0.0_f64, 0.0_f64, 0.0_f64);
    for f_deg in 0..=max_degree {
        for g_deg in 0..=max_degree {
            let f = random_poly(&mut rng, 2 * n, f_deg);
            let g = random_poly(&mut rng, 2 * n, g_deg);
            let lin = star_covariance_residual(&lattice, &f, &g, &linear)?;
            linear_abs = linear_abs.max(lin.max_coefficient);
            linear_rel = linear_rel.max(lin.relative());
            table.push(vec![f_deg.into(), g_deg.into(), "linear".into(), 0.0.into(), lin.max_coefficient.into()]);
            let non = star_covariance_residual(&lattice, &f, &g, &shear)?;
            shear_max = shear_max.max(non.max_coefficient);
            table.push(vec![
                f_deg.into(),
                g_deg.into(),
                "cubic-shear".into(),
                epsilon.into(),
                non.max_coefficient.into(),
            ]);
        }
    }
    // coefficients of degree-6 products reach 10³, so rounding is judged on that scale
    report.at_most("linear_residual_relative", linear_rel, 1e-12);
    report.value("linear_residual_absolute", linear_abs);
    report.value("cubic_shear_residual_max", shear_max);
    out.write_csv(report, "moyal_sweep.csv", &table)
}
