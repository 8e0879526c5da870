//! Hilbert–Schmidt diagnostics for symplectic maps against a complex
//! structure.
//!
//! Every operator on a finite truncation is Hilbert–Schmidt, so the
//! implementability criterion can only be probed through how `‖[S, J]‖_HS`
//! behaves as the truncation grows. The trend classification below is a
//! heuristic proxy and is labeled as such in [`HsReport::note`].

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::complex_structure::{polar_complex_structure, ComplexStructure};
use crate::error::{Error, Result};
use crate::lattice::SpatialLattice;
use crate::linalg::{frobenius, max_abs, symmetric_function};
use crate::linear_dynamics::{build_generator, QuadraticHamiltonian};
use crate::symplectic::{omega_matrix, pullback_residual};

/// Relative variation allowed over the final half of a scan for `bounded`.
pub const BOUNDED_RELATIVE_VARIATION: f64 = 0.05;
/// Norms at or below this count as zero when classifying.
pub const ZERO_NORM: f64 = 1e-10;

pub const TREND_NOTE: &str = "finite-truncation proxy: growth of the commutator \
    Hilbert-Schmidt norm with size, not a proof of (non)implementability";

/// `‖SJ − JS‖_F`.
pub fn hs_norm_commutator(s: &DMatrix<f64>, j: &ComplexStructure) -> Result<f64> {
    let jm = j.matrix();
    if s.nrows() != jm.nrows() || s.ncols() != jm.ncols() {
        return Err(Error::DimensionMismatch {
            expected: jm.nrows(),
            found: s.nrows().max(s.ncols()),
        });
    }
    let omega = omega_matrix(j.lattice());
    let r = pullback_residual(&omega, s);
    let scale = max_abs(s).max(1.0).powi(2) * max_abs(&omega).max(1.0);
    if r > 1e-10 * scale {
        return Err(Error::Validation(format!(
            "map is not symplectic (pullback residual {r:e})"
        )));
    }
    Ok(frobenius(&(s * jm - jm * s)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Bounded,
    Growing,
    Inconclusive,
}

impl Trend {
    pub fn as_str(self) -> &'static str {
        match self {
            Trend::Bounded => "bounded",
            Trend::Growing => "growing",
            Trend::Inconclusive => "inconclusive",
        }
    }
}

/// Classifies a norm sequence ordered by size.
///
/// * bounded: all norms vanish, or the final half varies by at most 5%
///   relative to its largest entry;
/// * growing: strictly increasing with last > 2 × first;
/// * inconclusive otherwise (including fewer than two sizes).
pub fn classify_trend(norms: &[f64]) -> Trend {
    if norms.len() < 2 {
        return Trend::Inconclusive;
    }
    if norms.iter().all(|&n| n <= ZERO_NORM) {
        return Trend::Bounded;
    }
    let tail = &norms[norms.len() / 2..];
    let hi = tail.iter().cloned().fold(f64::MIN, f64::max);
    let lo = tail.iter().cloned().fold(f64::MAX, f64::min);
    let increasing = norms.windows(2).all(|w| w[1] > w[0]);
    if increasing && norms[norms.len() - 1] > 2.0 * norms[0] {
        return Trend::Growing;
    }
    if tail.len() >= 2 && hi - lo <= BOUNDED_RELATIVE_VARIATION * hi {
        return Trend::Bounded;
    }
    Trend::Inconclusive
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HsReport {
    pub lattice_sizes: Vec<usize>,
    pub hs_norms: Vec<f64>,
    pub trend: Trend,
    pub note: &'static str,
}

/// Evaluates `family(d) = (S_d, J_d)` at each size; sizes are sorted first.
pub fn implementability_scan<F>(family: F, sizes: &[usize]) -> Result<HsReport>
where
    F: Fn(usize) -> Result<(DMatrix<f64>, ComplexStructure)>,
{
    let mut sizes = sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    let hs_norms = sizes
        .iter()
        .map(|&d| {
            let (s, j) = family(d)?;
            hs_norm_commutator(&s, &j)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HsReport {
        trend: classify_trend(&hs_norms),
        lattice_sizes: sizes,
        hs_norms,
        note: TREND_NOTE,
    })
}

/// `d` unit-weight modes, standard `J₀`, each mode squeezed by
/// `diag(e^r, e^{−r})` in its `(φ, π)` pair.
pub fn uniform_squeezing(d: usize, r: f64) -> Result<(DMatrix<f64>, ComplexStructure)> {
    let lattice = Arc::new(SpatialLattice::uniform(d, 1.0)?);
    let mut s = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        s[(i, i)] = r.exp();
        s[(d + i, d + i)] = (-r).exp();
    }
    Ok((s, ComplexStructure::standard(lattice)))
}

/// `√(m² − Δ)` for the periodic nearest-neighbor chain with spacing `a`.
fn chain_frequency(d: usize, mass: f64, spacing: f64) -> DMatrix<f64> {
    let mut k = DMatrix::from_diagonal_element(d, d, mass * mass);
    if d > 1 {
        let c = 1.0 / (spacing * spacing);
        for i in 0..d {
            let j = (i + 1) % d;
            k[(i, i)] += c;
            k[(j, j)] += c;
            k[(i, j)] -= c;
            k[(j, i)] -= c;
        }
    }
    symmetric_function(&k, f64::sqrt)
}

/// Bogoliubov map between the periodic chains of masses `m_from` and `m_to`
/// on `d` sites of spacing `a`: `S = diag(B, B⁻¹)` with
/// `B = (Ω_to / Ω_from)^{1/2}`, so that `S J_to S⁻¹ = J_from`. Paired with the
/// polar complex structure of the `m_from` chain.
pub fn mass_shift(
    d: usize,
    m_from: f64,
    m_to: f64,
    spacing: f64,
) -> Result<(DMatrix<f64>, ComplexStructure)> {
    let lattice = Arc::new(SpatialLattice::uniform(d, spacing)?);
    let h = QuadraticHamiltonian::klein_gordon_chain(lattice, m_from, spacing)?;
    let j = polar_complex_structure(&build_generator(&h)?)?;
    let w_from = chain_frequency(d, m_from, spacing);
    let w_to = chain_frequency(d, m_to, spacing);
    let inv_from = symmetric_function(&w_from, |v| 1.0 / v);
    let inv_to = symmetric_function(&w_to, |v| 1.0 / v);
    // the frequency matrices commute, so the products are symmetric
    let b = symmetric_function(&(&w_to * &inv_from), f64::sqrt);
    let b_inv = symmetric_function(&(&w_from * &inv_to), f64::sqrt);
    let mut s = DMatrix::zeros(2 * d, 2 * d);
    s.view_mut((0, 0), (d, d)).copy_from(&b);
    s.view_mut((d, d), (d, d)).copy_from(&b_inv);
    Ok((s, j))
}
