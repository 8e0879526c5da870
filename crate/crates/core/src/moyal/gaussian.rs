//! Gaussian (quasi-free) states on the Weyl algebra.
//!
//! `E(W(η)) = exp(iη(m) − ¼⟨ω(η), ω(η)⟩_J)`, where `m` is the mean phase
//! vector and the dual vector η enters the complex-structure metric through
//! the ω map. For the polar structure of a quadratic Hamiltonian this is the
//! ground-state characteristic functional.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::complex_structure::ComplexStructure;
use crate::error::{Error, Result};
use crate::lattice::{same_lattice, SpatialLattice};
use crate::linalg::CMatrix;
use crate::moyal::weyl::{coords_of, weyl_involution, weyl_star, WeylElement};
use crate::symplectic::PhaseVector;

#[derive(Debug, Clone)]
pub struct GaussianState {
    lattice: Arc<SpatialLattice>,
    mean: DVector<f64>,
    complex_structure: ComplexStructure,
    /// `b = M m`, so `η(m) = bᵀη`.
    linear: DVector<f64>,
    /// `ωᵀ G ω` with `G` the metric of `J`; `E = exp(ibᵀη − ¼ηᵀQη)`.
    quadratic: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(mean: &PhaseVector, j: ComplexStructure) -> Result<Self> {
        same_lattice(mean.lattice(), j.lattice())?;
        let lattice = j.lattice().clone();
        let n = lattice.site_count();
        let mean = mean.coords();
        let linear = DVector::from_fn(2 * n, |a, _| lattice.weight(a % n) * mean[a]);
        let omega = ComplexStructure::standard(lattice.clone()).matrix().clone();
        let quadratic = omega.transpose() * j.metric() * omega;
        Ok(Self {
            lattice,
            mean,
            complex_structure: j,
            linear,
            quadratic,
        })
    }

    /// Mean-zero state of `J`.
    pub fn vacuum(j: ComplexStructure) -> Self {
        let zero = PhaseVector::zeros(j.lattice().clone());
        Self::new(&zero, j).expect("same lattice")
    }

    pub fn lattice(&self) -> &Arc<SpatialLattice> {
        &self.lattice
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.complex_structure
    }

    pub fn characteristic_coords(&self, eta: &DVector<f64>) -> Complex64 {
        let lin = self.linear.dot(eta);
        let quad = eta.dot(&(&self.quadratic * eta));
        Complex64::new(-0.25 * quad, lin).exp()
    }

    /// `E(W(η))`.
    pub fn characteristic(&self, eta: &PhaseVector) -> Result<Complex64> {
        same_lattice(&self.lattice, eta.lattice())?;
        Ok(self.characteristic_coords(&eta.coords()))
    }

    /// Symmetrized field covariance `⟨ψ̂_A ψ̂_B⟩ − ⟨ψ̂_A⟩⟨ψ̂_B⟩`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.lattice.site_count();
        DMatrix::from_fn(2 * n, 2 * n, |a, b| {
            0.5 * self.quadratic[(a, b)] / (self.lattice.weight(a % n) * self.lattice.weight(b % n))
        })
    }
}

/// Linear extension `E(Σ αₖ W(ηₖ)) = Σ αₖ E(W(ηₖ))`.
pub fn gaussian_expect(state: &GaussianState, a: &WeylElement) -> Result<Complex64> {
    same_lattice(&state.lattice, a.lattice())?;
    Ok(a
        .raw_terms()
        .map(|(k, c)| c * state.characteristic_coords(&coords_of(k)))
        .sum())
}

/// `Gᵢⱼ = E(W(ηᵢ)* ⋆ W(ηⱼ))`, evaluated through the algebra.
pub fn gram_matrix(state: &GaussianState, etas: &[PhaseVector]) -> Result<CMatrix> {
    let gens = etas
        .iter()
        .map(|e| WeylElement::generator(e, Complex64::new(1.0, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let stars: Vec<WeylElement> = gens.iter().map(weyl_involution).collect();
    let k = gens.len();
    let mut g = CMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            g[(i, j)] = gaussian_expect(state, &weyl_star(&stars[i], &gens[j])?)?;
        }
    }
    Ok(g)
}

/// Symmetrized `n`-point function as a dense tensor over phase coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NPoint {
    pub order: usize,
    pub dim: usize,
    /// Row-major values, index `(A₁, …, Aₙ)`.
    pub values: Vec<f64>,
}

impl NPoint {
    pub fn get(&self, index: &[usize]) -> f64 {
        assert_eq!(index.len(), self.order);
        let flat = index.iter().fold(0, |acc, &a| acc * self.dim + a);
        self.values[flat]
    }
}

fn moment(kappa1: &DVector<f64>, kappa2: &DMatrix<f64>, idx: &[usize]) -> f64 {
    match idx.split_first() {
        None => 1.0,
        Some((&a, rest)) => {
            let mut total = kappa1[a] * moment(kappa1, kappa2, rest);
            for (pos, &b) in rest.iter().enumerate() {
                let mut remaining = rest.to_vec();
                remaining.remove(pos);
                total += kappa2[(a, b)] * moment(kappa1, kappa2, &remaining);
            }
            total
        }
    }
}

/// `⟨ψ̂_{A₁}…ψ̂_{Aₙ}⟩ = (−i)ⁿ ∂ⁿE(W(η))/∂η_{A₁}…∂η_{Aₙ} |₀ / (μ_{A₁}…μ_{Aₙ})`,
/// so that the one-point function is the mean. Orders 1 through 4.
pub fn n_point(state: &GaussianState, order: usize) -> Result<NPoint> {
    if !(1..=4).contains(&order) {
        return Err(Error::OutOfRange {
            what: "n-point order",
            value: order,
            min: 1,
            max: 4,
        });
    }
    let n = state.lattice.site_count();
    let dim = 2 * n;
    let kappa2 = &state.quadratic * 0.5;
    let total = dim.pow(order as u32);
    let mut values = Vec::with_capacity(total);
    let mut idx = vec![0usize; order];
    for flat in 0..total {
        let mut r = flat;
        for slot in (0..order).rev() {
            idx[slot] = r % dim;
            r /= dim;
        }
        let scale: f64 = idx.iter().map(|&a| state.lattice.weight(a % n)).product();
        values.push(moment(&state.linear, &kappa2, &idx) / scale);
    }
    Ok(NPoint { order, dim, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_structure::polar_complex_structure;
    use crate::linear_dynamics::{build_generator, QuadraticHamiltonian};

    fn oscillator_state(omega: f64) -> GaussianState {
        let l = Arc::new(SpatialLattice::uniform(1, 1.0).unwrap());
        let h = QuadraticHamiltonian::klein_gordon_chain(l, omega, 1.0).unwrap();
        GaussianState::vacuum(polar_complex_structure(&build_generator(&h).unwrap()).unwrap())
    }

    #[test]
    fn ground_state_variances() {
        // ⟨φ²⟩ = 1/(2ω), ⟨π²⟩ = ω/2 for the unit-mass oscillator
        let s = oscillator_state(2.0);
        let two = n_point(&s, 2).unwrap();
        assert!((two.get(&[0, 0]) - 0.25).abs() < 1e-14);
        assert!((two.get(&[1, 1]) - 1.0).abs() < 1e-14);
        assert!(two.get(&[0, 1]).abs() < 1e-14);
    }

    #[test]
    fn normalization_and_odd_moments() {
        let s = oscillator_state(1.5);
        let unit = WeylElement::identity(s.lattice().clone());
        assert_eq!(gaussian_expect(&s, &unit).unwrap(), Complex64::new(1.0, 0.0));
        assert!(n_point(&s, 1).unwrap().values.iter().all(|v| *v == 0.0));
        assert!(n_point(&s, 3).unwrap().values.iter().all(|v| *v == 0.0));
        assert!(n_point(&s, 5).is_err());
        assert!(n_point(&s, 0).is_err());
    }

    #[test]
    fn displaced_one_point_is_mean() {
        let l = Arc::new(SpatialLattice::new(vec![0.5, 2.0], vec![vec![0, 1]]).unwrap());
        let j = ComplexStructure::standard(l.clone());
        let m = PhaseVector::from_parts(l, vec![0.3, -1.2], vec![0.7, 0.1]).unwrap();
        let s = GaussianState::new(&m, j).unwrap();
        let one = n_point(&s, 1).unwrap();
        for (a, v) in m.coords().iter().enumerate() {
            assert!((one.get(&[a]) - v).abs() < 1e-14);
        }
    }
}
