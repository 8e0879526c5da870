use std::f64::consts::PI;

use phasefield::implementability::{implementability_scan, mass_shift, uniform_squeezing, HsReport};

use super::max_of;
use crate::config::{non_negative, positive, ExperimentConfig};
use crate::error::CliError;
use crate::output::{Output, Table};
use crate::report::RunReport;

/// `2√2 sinh r` per squeezed mode.
fn squeeze_oracle(d: usize, r: f64) -> f64 {
    2.0 * 2f64.sqrt() * r.sinh() * (d as f64).sqrt()
}

/// Plane-wave sum `(Σₖ (bₖ − 1/bₖ)² (ωₖ⁻² + ωₖ²))^{1/2}`, `bₖ² = ω_to,k / ω_from,k`.
fn mass_shift_oracle(d: usize, m_from: f64, m_to: f64, a: f64) -> f64 {
    let omega = |m: f64, k: usize| (m * m + 4.0 / (a * a) * (PI * k as f64 / d as f64).sin().powi(2)).sqrt();
    (0..d)
        .map(|k| {
            let w = omega(m_from, k);
            let b = (omega(m_to, k) / w).sqrt();
            (b - 1.0 / b).powi(2) * (1.0 / (w * w) + w * w)
        })
        .sum::<f64>()
        .sqrt()
}

/// Finite-size scan of `‖[S, J]‖_HS` for a squeezing or mass-shift family.
/// The growth trend is a finite-size proxy, not a proof of (non-)implementability.
pub fn run(config: &ExperimentConfig, out: &Output, report: &mut RunReport) -> Result<(), CliError> {
    let family = config.family.clone().unwrap_or_else(|| "squeeze".to_string());
    let sizes = config.sizes.clone().unwrap_or_else(|| vec![2, 4, 8, 16]);
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(CliError::Config("`sizes` must be a non-empty list of positive sizes".into()));
    }
    report.param("family", family.as_str());
    report.param("sizes", sizes.clone());

    let (scan, oracle): (HsReport, Box<dyn Fn(usize) -> f64>) = match family.as_str() {
        "squeeze" => {
            let r = non_negative("r", config.r.unwrap_or(1.0))?;
            report.param("r", r);
            (implementability_scan(|d| uniform_squeezing(d, r), &sizes)?, Box::new(move |d| squeeze_oracle(d, r)))
        }
        "mass-shift" => {
            let m = positive("m", config.m.unwrap_or(1.0))?;
            let m_to = positive("m_to", config.m_to.unwrap_or(2.0))?;
            let a = positive("a", config.a.unwrap_or(1.0))?;
            report.param("m", m);
            report.param("m_to", m_to);
            report.param("a", a);
            (
                implementability_scan(|d| mass_shift(d, m, m_to, a), &sizes)?,
                Box::new(move |d| mass_shift_oracle(d, m, m_to, a)),
            )
        }
        other => {
            return Err(CliError::Config(format!("unknown family `{other}`; expected squeeze or mass-shift")));
        }
    };

    let deviation = max_of(
        scan.lattice_sizes
            .iter()
            .zip(&scan.hs_norms)
            .map(|(&d, &n)| (n - oracle(d)).abs() / oracle(d).max(1.0)),
    );
    report.at_most("closed_form_deviation", deviation, 1e-10);
    report.value("lattice_sizes", scan.lattice_sizes.clone());
    report.value("hs_norms", scan.hs_norms.clone());
    report.value("trend", scan.trend.as_str());
    report.value("trend_note", scan.note);

    let mut table = Table::new(&["size", "hs_norm"]);
    for (&d, &n) in scan.lattice_sizes.iter().zip(&scan.hs_norms) {
        table.push(vec![d.into(), n.into()]);
    }
    out.write_csv(report, "hs_scan.csv", &table)
}
