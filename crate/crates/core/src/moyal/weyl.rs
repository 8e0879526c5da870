//! The algebra spanned by the exponentials `W(η)(ψ) = exp(iη(ψ))` for dual
//! vectors η, with `W(η)⋆W(η′) = exp(−½iΩ(η, η′)) W(η + η′)`.
//!
//! Dual vectors are stored on a `1e-12` integer grid, so sums of keys are
//! exact and the symplectic phases are computed from integer cross products.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex_structure::ComplexStructure;
use crate::error::{Error, Result};
use crate::lattice::{same_lattice, SpatialLattice};
use crate::linalg::max_abs;
use crate::symplectic::{omega_matrix, pullback_residual, PhaseVector, SymplecticMap};

/// Grid spacing used to canonicalize dual-vector keys.
pub const KEY_GRID: f64 = 1e-12;
const KEY_LIMIT: f64 = 9.0e6;

pub(crate) type Key = Vec<i64>;

pub(crate) fn key_of(x: &DVector<f64>) -> Result<Key> {
    x.iter()
        .map(|&v| {
            if !v.is_finite() || v.abs() > KEY_LIMIT {
                return Err(Error::Validation(format!(
                    "dual-vector component {v} outside the representable key range"
                )));
            }
            Ok((v / KEY_GRID).round() as i64)
        })
        .collect()
}

pub(crate) fn coords_of(key: &[i64]) -> DVector<f64> {
    DVector::from_iterator(key.len(), key.iter().map(|&k| k as f64 * KEY_GRID))
}

/// `Ω(η, η′) = Σ μᵢ (φᵢπ′ᵢ − πᵢφ′ᵢ)` evaluated from grid keys.
pub(crate) fn key_omega(lattice: &SpatialLattice, a: &[i64], b: &[i64]) -> f64 {
    let n = lattice.site_count();
    lattice
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let cross = i128::from(a[i]) * i128::from(b[n + i]) - i128::from(a[n + i]) * i128::from(b[i]);
            w * (cross as f64 * KEY_GRID * KEY_GRID)
        })
        .sum()
}

/// Weighted pairing `η(ψ) = Σ μᵢ (η_φ ψ_φ + η_π ψ_π)`.
pub(crate) fn key_pair(lattice: &SpatialLattice, key: &[i64], psi: &DVector<f64>) -> f64 {
    let n = lattice.site_count();
    lattice
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| w * (key[i] as f64 * KEY_GRID * psi[i] + key[n + i] as f64 * KEY_GRID * psi[n + i]))
        .sum()
}

/// Finite linear combination `Σ αₖ W(ηₖ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylElement {
    lattice: Arc<SpatialLattice>,
    terms: BTreeMap<Key, Complex64>,
}

impl WeylElement {
    pub fn zero(lattice: Arc<SpatialLattice>) -> Self {
        Self {
            lattice,
            terms: BTreeMap::new(),
        }
    }

    /// `W(0)`, the unit.
    pub fn identity(lattice: Arc<SpatialLattice>) -> Self {
        let dim = 2 * lattice.site_count();
        let mut out = Self::zero(lattice);
        out.insert(vec![0; dim], Complex64::new(1.0, 0.0));
        out
    }

    /// `α W(η)`.
    pub fn generator(eta: &PhaseVector, alpha: Complex64) -> Result<Self> {
        let mut out = Self::zero(eta.lattice().clone());
        out.insert(key_of(&eta.coords())?, alpha);
        Ok(out)
    }

    pub fn from_terms(
        lattice: Arc<SpatialLattice>,
        terms: impl IntoIterator<Item = (PhaseVector, Complex64)>,
    ) -> Result<Self> {
        let mut out = Self::zero(lattice);
        for (eta, c) in terms {
            same_lattice(&out.lattice, eta.lattice())?;
            out.insert(key_of(&eta.coords())?, c);
        }
        Ok(out)
    }

    fn insert(&mut self, key: Key, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == Complex64::new(0.0, 0.0) {
                    o.remove();
                }
            }
        }
    }

    pub fn lattice(&self) -> &Arc<SpatialLattice> {
        &self.lattice
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as (dual-vector coordinates, coefficient), in key order.
    pub fn terms(&self) -> Vec<(DVector<f64>, Complex64)> {
        self.terms.iter().map(|(k, c)| (coords_of(k), *c)).collect()
    }

    pub(crate) fn raw_terms(&self) -> impl Iterator<Item = (&Key, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, eta: &PhaseVector) -> Result<Complex64> {
        Ok(self
            .terms
            .get(&key_of(&eta.coords())?)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0)))
    }

    pub fn add(&self, other: &WeylElement) -> Result<WeylElement> {
        same_lattice(&self.lattice, &other.lattice)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), *c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> WeylElement {
        let mut out = Self::zero(self.lattice.clone());
        for (k, c) in &self.terms {
            out.insert(k.clone(), c * s);
        }
        out
    }

    /// `Σ αₖ exp(iηₖ(ψ))`.
    pub fn eval(&self, psi: &DVector<f64>) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| c * Complex64::new(0.0, key_pair(&self.lattice, k, psi)).exp())
            .sum()
    }

    /// Largest coefficient mismatch after pooling keys closer than
    /// `key_tol` (max-norm in coordinates); `key_tol = 0` compares exact keys.
    pub fn distance(&self, other: &WeylElement, key_tol: f64) -> Result<f64> {
        same_lattice(&self.lattice, &other.lattice)?;
        let grid_tol = (key_tol / KEY_GRID).ceil() as i64;
        let mut pools: Vec<(Key, Complex64)> = Vec::new();
        let signed = self
            .terms
            .iter()
            .map(|(k, c)| (k, *c))
            .chain(other.terms.iter().map(|(k, c)| (k, -c)));
        for (k, c) in signed {
            let hit = pools.iter_mut().find(|(rep, _)| {
                rep.iter().zip(k).all(|(a, b)| (a - b).abs() <= grid_tol)
            });
            match hit {
                Some((_, acc)) => *acc += c,
                None => pools.push((k.clone(), c)),
            }
        }
        Ok(pools.iter().fold(0.0_f64, |m, (_, c)| m.max(c.norm())))
    }
}

/// Bilinear extension of `W(η)⋆W(η′) = exp(−½iΩ(η, η′)) W(η + η′)`.
pub fn weyl_star(a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
    same_lattice(&a.lattice, &b.lattice)?;
    let mut out = WeylElement::zero(a.lattice.clone());
    for (ka, ca) in &a.terms {
        for (kb, cb) in &b.terms {
            let phase = Complex64::new(0.0, -0.5 * key_omega(&a.lattice, ka, kb)).exp();
            let key: Key = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            out.insert(key, ca * cb * phase);
        }
    }
    Ok(out)
}

/// `(Σ αₖ W(ηₖ))* = Σ conj(αₖ) W(−ηₖ)`.
pub fn weyl_involution(a: &WeylElement) -> WeylElement {
    let mut out = WeylElement::zero(a.lattice.clone());
    for (k, c) in &a.terms {
        out.insert(k.iter().map(|x| -x).collect(), c.conj());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Computable bounds on the supremum norm: the upper bound is `Σ|αₖ|`; the
/// lower bound is the largest `|a(ψ)|` over ψ = 0 and `sample_count − 1`
/// seeded random points.
pub fn sup_norm_bounds(a: &WeylElement, sample_count: usize, seed: u64) -> Result<NormBounds> {
    if sample_count == 0 {
        return Err(Error::OutOfRange {
            what: "sample_count",
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    let upper: f64 = a.terms.values().map(|c| c.norm()).sum();
    let dim = 2 * a.lattice.site_count();
    // spread samples so the phases η(ψ) sweep a full period
    let reach = a
        .terms
        .keys()
        .map(|k| {
            (0..dim)
                .map(|i| a.lattice.weight(i % a.lattice.site_count()) * (k[i] as f64 * KEY_GRID).abs())
                .sum::<f64>()
        })
        .fold(0.0_f64, f64::max);
    let radius = if reach > 0.0 { 2.0 * std::f64::consts::PI / reach } else { 1.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lower = a.eval(&DVector::zeros(dim)).norm();
    for _ in 1..sample_count {
        let psi = DVector::from_fn(dim, |_, _| rng.random_range(-radius..=radius));
        lower = lower.max(a.eval(&psi).norm());
    }
    Ok(NormBounds {
        lower: lower.min(upper),
        upper,
    })
}

/// Matrix of the ω map `(φ, π) ↦ (π, −φ)`, which identifies dual vectors
/// with phase vectors: `η(ψ) = Ω(ω(η), ψ)`.
pub fn omega_map_matrix(lattice: &SpatialLattice) -> DMatrix<f64> {
    ComplexStructure::standard(Arc::new(lattice.clone())).matrix().clone()
}

/// `Γ(U)a = a ∘ U⁻¹` for a linear symplectic `U`; on generators
/// `W(η) ↦ W(ω⁻¹ U ω η)`.
pub fn linear_automorphism(u: &SymplecticMap, a: &WeylElement) -> Result<WeylElement> {
    let m = u.matrix().ok_or(Error::NonlinearMap)?;
    let omega = omega_matrix(&a.lattice);
    if m.nrows() != omega.nrows() || m.ncols() != omega.ncols() {
        return Err(Error::DimensionMismatch {
            expected: omega.nrows(),
            found: m.nrows().max(m.ncols()),
        });
    }
    let r = pullback_residual(&omega, m);
    if r > 1e-10 * max_abs(m).max(1.0).powi(2) * max_abs(&omega).max(1.0) {
        return Err(Error::Validation(format!(
            "map is not symplectic (pullback residual {r:e})"
        )));
    }
    let w = omega_map_matrix(&a.lattice);
    let dual = -&w * m * &w; // ω⁻¹ = −ω
    let mut out = WeylElement::zero(a.lattice.clone());
    for (k, c) in &a.terms {
        let exact = k.iter().all(|&v| v == 0);
        let key = if exact { k.clone() } else { key_of(&(&dual * coords_of(k)))? };
        out.insert(key, *c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_site() -> Arc<SpatialLattice> {
        Arc::new(SpatialLattice::uniform(1, 1.0).unwrap())
    }

    fn gen(l: &Arc<SpatialLattice>, phi: f64, pi: f64, c: Complex64) -> WeylElement {
        WeylElement::generator(&PhaseVector::from_parts(l.clone(), vec![phi], vec![pi]).unwrap(), c)
            .unwrap()
    }

    #[test]
    fn phase_of_pi_omega() {
        let l = one_site();
        let one = Complex64::new(1.0, 0.0);
        // Ω((√π, 0), (0, √π)) = π
        let s = std::f64::consts::PI.sqrt();
        let a = gen(&l, s, 0.0, one);
        let b = gen(&l, 0.0, s, one);
        let p = weyl_star(&a, &b).unwrap();
        assert_eq!(p.term_count(), 1);
        let (_, c) = p.terms()[0].clone();
        assert!((c - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn unit_and_zero() {
        let l = one_site();
        let a = gen(&l, 0.3, -0.7, Complex64::new(2.0, 1.0));
        let e = WeylElement::identity(l.clone());
        assert_eq!(weyl_star(&e, &a).unwrap(), a);
        assert_eq!(weyl_star(&a, &e).unwrap(), a);
        let z = WeylElement::zero(l);
        assert_eq!(sup_norm_bounds(&z, 4, 0).unwrap(), NormBounds { lower: 0.0, upper: 0.0 });
    }

    #[test]
    fn cancellation_purges_terms() {
        let l = one_site();
        let a = gen(&l, 0.3, 0.1, Complex64::new(1.0, 0.0));
        let s = a.add(&a.scale(Complex64::new(-1.0, 0.0))).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn norm_bounds_examples() {
        let l = one_site();
        let a = gen(&l, 0.4, 0.9, Complex64::new(2.0, 0.0));
        let b = sup_norm_bounds(&a, 10, 7).unwrap();
        assert!((b.lower - 2.0).abs() < 1e-14 && (b.upper - 2.0).abs() < 1e-14);
        let c = gen(&l, 0.4, 0.9, Complex64::new(1.0, 0.0))
            .add(&gen(&l, -0.4, -0.9, Complex64::new(1.0, 0.0)))
            .unwrap();
        let b = sup_norm_bounds(&c, 50, 7).unwrap();
        assert_eq!(b.upper, 2.0);
        assert!((b.lower - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nonlinear_map_rejected() {
        let l = one_site();
        let a = gen(&l, 0.4, 0.9, Complex64::new(1.0, 0.0));
        let u = SymplecticMap::nonlinear(2, |x| x.clone(), None);
        assert!(matches!(linear_automorphism(&u, &a), Err(Error::NonlinearMap)));
    }
}
