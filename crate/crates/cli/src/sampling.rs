//! Seeded random inputs. Every experiment draws from one ChaCha8 stream.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use phasefield::fock::ModeVector;
use phasefield::lattice::SpatialLattice;
use phasefield::linalg::{expm, CMatrix};
use phasefield::symplectic::{poisson_tensor, PhaseVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
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
    PhaseVector::from_parts(lattice.clone(), real_vec(rng, n, scale), real_vec(rng, n, scale))
        .expect("lengths match the lattice")
}

/// Mode vector with norm drawn from `[0.2, 1] · radius`.
pub fn mode(rng: &mut ChaCha8Rng, d: usize, radius: f64) -> ModeVector {
    let v = ModeVector::new(complex_vec(rng, d, 1.0)).expect("non-empty");
    let n = v.norm();
    v.scale(Complex64::new(radius * rng.random_range(0.2..1.0) / n, 0.0))
}

pub fn hermitian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMatrix {
    let m = CMatrix::from_vec(d, d, complex_vec(rng, d * d, scale));
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn state(rng: &mut ChaCha8Rng, dim: usize) -> DVector<Complex64> {
    let v = DVector::from_vec(complex_vec(rng, dim, 1.0));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// `exp(P K)` for a random symmetric `K`.
pub fn symplectic_matrix(rng: &mut ChaCha8Rng, lattice: &SpatialLattice, scale: f64) -> DMatrix<f64> {
    let dim = 2 * lattice.site_count();
    let k = DMatrix::from_vec(dim, dim, real_vec(rng, dim * dim, scale));
    expm(&(poisson_tensor(lattice) * (&k + k.transpose()) * 0.5))
}
