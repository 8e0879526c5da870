//! Seeded random inputs shared by the integration and acceptance suites.
#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use phasefield::lattice::SpatialLattice;
use phasefield::linalg::{expm, expm_c, CMatrix, CVector};
use phasefield::symplectic::{poisson_tensor, PhaseVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn real_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-scale..scale)).collect()
}

pub fn complex_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
        .collect()
}

pub fn phase_vector(rng: &mut ChaCha8Rng, lattice: &Arc<SpatialLattice>, scale: f64) -> PhaseVector {
    let n = lattice.site_count();
    PhaseVector::from_parts(lattice.clone(), real_vec(rng, n, scale), real_vec(rng, n, scale)).unwrap()
}

pub fn hermitian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMatrix {
    let m = CMatrix::from_vec(d, d, complex_vec(rng, d * d, scale));
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    expm_c(&(hermitian(rng, d, 1.0) * Complex64::new(0.0, 1.0)))
}

pub fn symmetric(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<f64> {
    let m = DMatrix::from_vec(d, d, real_vec(rng, d * d, scale));
    (&m + m.transpose()) * 0.5
}

/// `exp(P K)` for a random symmetric `K`: a linear symplectic map of the lattice phase space.
pub fn symplectic_matrix(rng: &mut ChaCha8Rng, lattice: &SpatialLattice, scale: f64) -> DMatrix<f64> {
    let dim = 2 * lattice.site_count();
    expm(&(poisson_tensor(lattice) * symmetric(rng, dim, scale)))
}

pub fn state_vector(rng: &mut ChaCha8Rng, dim: usize) -> CVector {
    let v = CVector::from_vec(complex_vec(rng, dim, 1.0));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

pub fn coords(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> DVector<f64> {
    DVector::from_vec(real_vec(rng, dim, scale))
}
