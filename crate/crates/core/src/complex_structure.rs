//! Symplectic-compatible complex structures.
//!
//! Two constructions from a generator `Ĥ` with positive definite Hamiltonian
//! form `K`:
//!
//! * polar: `J = Ĥ |Ĥ|⁻¹` with `|Ĥ|` the positive square root of
//!   `Ĥ†Ĥ = −Ĥ²` (adjoint taken with respect to Ω);
//! * positive-frequency split: the projector `P` of the complexified phase
//!   space onto the `+i` eigenspace of `Ĥ`, from which `J̃ = i(2P − 1)`.
//!
//! Both go through the antisymmetric matrix `A = K^{1/2} Ĥ K^{-1/2}`, which is
//! orthogonally diagonalizable, so eigen-solves stay symmetric/Hermitian.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{same_lattice, SpatialLattice};
use crate::linalg::{
    max_abs, max_abs_c, sorted_hermitian_eigen, sorted_symmetric_eigen, symmetric_function,
    to_complex, CMatrix, CVector,
};
use crate::linear_dynamics::GeneratorOperator;
use crate::symplectic::{omega_coords, omega_matrix, PhaseVector};

/// Default tolerance for the defining identities.
pub const INVARIANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub passed: bool,
    pub residual: f64,
}

/// Per-condition outcome of [`check_compatibility`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatibilityReport {
    /// `J² = −1`.
    pub complex: ConditionCheck,
    /// `J ∈ Sp(Φ, Ω)`.
    pub symplectic: ConditionCheck,
    /// `Ω(Jη, η) ≥ 0`; residual is the negative part of the smallest
    /// eigenvalue of the symmetric form `Ω(J·, ·)`.
    pub positive: ConditionCheck,
    pub tolerance: f64,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.complex.passed && self.symplectic.passed && self.positive.passed
    }
}

/// Validates the three defining conditions of a compatible complex structure.
pub fn check_compatibility(
    lattice: &SpatialLattice,
    j: &DMatrix<f64>,
    tol: f64,
) -> Result<CompatibilityReport> {
    let dim = 2 * lattice.site_count();
    if j.nrows() != dim || j.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: j.nrows().max(j.ncols()),
        });
    }
    let omega = omega_matrix(lattice);
    let complex = max_abs(&(j * j + DMatrix::identity(dim, dim)));
    let symplectic = max_abs(&(j.transpose() * &omega * j - &omega));
    let metric = j.transpose() * &omega;
    let min_eig = sorted_symmetric_eigen(&metric).0[0];
    let positive = (-min_eig).max(0.0);
    let check = |r: f64| ConditionCheck {
        passed: r <= tol,
        residual: r,
    };
    Ok(CompatibilityReport {
        complex: check(complex),
        symplectic: check(symplectic),
        positive: check(positive),
        tolerance: tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure {
    lattice: Arc<SpatialLattice>,
    matrix: DMatrix<f64>,
}

impl ComplexStructure {
    /// Accepts `j` when every condition holds to `1e-12` scaled by `max(1, |J|²)`.
    pub fn new(lattice: Arc<SpatialLattice>, j: DMatrix<f64>) -> Result<Self> {
        let scale = max_abs(&j).max(1.0);
        let report = check_compatibility(&lattice, &j, INVARIANT_TOL * scale * scale)?;
        if !report.passed() {
            return Err(Error::Validation(format!(
                "not a compatible complex structure: J²+1 residual {:e}, symplectic residual {:e}, \
                 positivity residual {:e}",
                report.complex.residual, report.symplectic.residual, report.positive.residual
            )));
        }
        Ok(Self { lattice, matrix: j })
    }

    /// `J₀(φ, π) = (π, −φ)` site by site.
    pub fn standard(lattice: Arc<SpatialLattice>) -> Self {
        let n = lattice.site_count();
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = 1.0;
            j[(n + i, i)] = -1.0;
        }
        Self { lattice, matrix: j }
    }

    pub fn lattice(&self) -> &Arc<SpatialLattice> {
        &self.lattice
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn report(&self) -> CompatibilityReport {
        check_compatibility(&self.lattice, &self.matrix, INVARIANT_TOL).expect("dimensions fixed")
    }

    /// Symmetric matrix `G` with `ηᵀ G η′ = Ω(Jη, η′)`.
    pub fn metric(&self) -> DMatrix<f64> {
        let g = self.matrix.transpose() * omega_matrix(&self.lattice);
        (&g + g.transpose()) * 0.5
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x
    }

    /// `⟨x, y⟩ = Ω(Jx, y) − iΩ(x, y)` on flat coordinates.
    pub fn inner_coords(&self, x: &DVector<f64>, y: &DVector<f64>) -> Complex64 {
        let jx = self.apply(x);
        Complex64::new(
            omega_coords(&self.lattice, &jx, y),
            -omega_coords(&self.lattice, x, y),
        )
    }

    /// `(a + ib) x = a x + b J x`.
    pub fn scalar_mul(&self, c: Complex64, x: &DVector<f64>) -> DVector<f64> {
        x * c.re + self.apply(x) * c.im
    }

    /// Orthonormal basis of Φ as a complex Hilbert space, by Gram–Schmidt
    /// over the coordinate basis. Its length is the complex dimension.
    pub fn orthonormal_frame(&self) -> Vec<DVector<f64>> {
        let dim = self.matrix.nrows();
        let mut frame: Vec<DVector<f64>> = Vec::new();
        for a in 0..dim {
            let mut v = DVector::zeros(dim);
            v[a] = 1.0;
            for e in &frame {
                let c = self.inner_coords(e, &v);
                v -= self.scalar_mul(c, e);
            }
            let norm2 = self.inner_coords(&v, &v).re;
            if norm2 > 1e-10 {
                frame.push(v / norm2.sqrt());
            }
            if frame.len() * 2 == dim {
                break;
            }
        }
        frame
    }

    pub fn complex_dimension(&self) -> usize {
        self.orthonormal_frame().len()
    }

    /// Components `zₖ = ⟨eₖ, η⟩` in the orthonormal frame; `⟨η, η′⟩ = Σ conj(zₖ) z′ₖ`.
    pub fn mode_coordinates(&self, x: &DVector<f64>) -> CVector {
        let frame = self.orthonormal_frame();
        CVector::from_iterator(frame.len(), frame.iter().map(|e| self.inner_coords(e, x)))
    }

    /// `max |[U, J]|`.
    pub fn commutator_residual(&self, u: &DMatrix<f64>) -> f64 {
        max_abs(&(u * &self.matrix - &self.matrix * u))
    }
}

/// `⟨η, η′⟩ = Ω(Jη, η′) − iΩ(η, η′)`.
pub fn induced_inner_product(
    j: &ComplexStructure,
    eta: &PhaseVector,
    eta2: &PhaseVector,
) -> Result<Complex64> {
    same_lattice(j.lattice(), eta.lattice())?;
    same_lattice(j.lattice(), eta2.lattice())?;
    Ok(j.inner_coords(&eta.coords(), &eta2.coords()))
}

/// Square roots of the positive definite Hamiltonian form and the
/// antisymmetric `A = K^{1/2} Ĥ K^{-1/2}`.
struct EnergyFrame {
    sqrt_k: DMatrix<f64>,
    inv_sqrt_k: DMatrix<f64>,
    a: DMatrix<f64>,
}

fn energy_frame(generator: &GeneratorOperator) -> Result<EnergyFrame> {
    let k = generator.hamiltonian_form();
    let (values, _) = sorted_symmetric_eigen(&k);
    let scale = max_abs(&k).max(f64::MIN_POSITIVE);
    if values[0] <= 1e-12 * scale {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: values[0],
        });
    }
    let sqrt_k = symmetric_function(&k, f64::sqrt);
    let inv_sqrt_k = symmetric_function(&k, |v| 1.0 / v.sqrt());
    let a = &sqrt_k * generator.matrix() * &inv_sqrt_k;
    let a = (&a - a.transpose()) * 0.5;
    Ok(EnergyFrame {
        sqrt_k,
        inv_sqrt_k,
        a,
    })
}

/// `|Ĥ| = √(Ĥ†Ĥ)`, Ĥ† the Ω-adjoint.
pub fn generator_modulus(generator: &GeneratorOperator) -> Result<DMatrix<f64>> {
    let f = energy_frame(generator)?;
    let b = f.a.transpose() * &f.a;
    Ok(&f.inv_sqrt_k * symmetric_function(&b, f64::sqrt) * &f.sqrt_k)
}

/// `J = Ĥ / |Ĥ|`.
pub fn polar_complex_structure(generator: &GeneratorOperator) -> Result<ComplexStructure> {
    let f = energy_frame(generator)?;
    let b = f.a.transpose() * &f.a;
    let inv_abs = symmetric_function(&b, |v| 1.0 / v.sqrt());
    let j = &f.inv_sqrt_k * (&f.a * inv_abs) * &f.sqrt_k;
    ComplexStructure::new(generator.lattice().clone(), j)
}

/// Projector `P` on the complexification `Φ^ℂ` together with the complex
/// structure `J̃` it encodes through `P = ½(1 − iJ̃)`, i.e. the real block
/// form `½[[1, J̃], [−J̃, 1]]` on `Φ × Φ`.
#[derive(Debug, Clone)]
pub struct ComplexificationSplit {
    projector: CMatrix,
    jtilde: ComplexStructure,
}

impl ComplexificationSplit {
    pub fn projector(&self) -> &CMatrix {
        &self.projector
    }

    pub fn jtilde(&self) -> &ComplexStructure {
        &self.jtilde
    }

    /// `½[[1, J̃], [−J̃, 1]]` acting on `(Re, Im)` pairs.
    pub fn real_block(&self) -> DMatrix<f64> {
        let j = self.jtilde.matrix();
        let n = j.nrows();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&(DMatrix::identity(n, n) * 0.5));
        m.view_mut((n, n), (n, n)).copy_from(&(DMatrix::identity(n, n) * 0.5));
        m.view_mut((0, n), (n, n)).copy_from(&(j * 0.5));
        m.view_mut((n, 0), (n, n)).copy_from(&(j * -0.5));
        m
    }

    /// Realification `[[Re P, −Im P], [Im P, Re P]]` of the complex projector.
    pub fn realified_projector(&self) -> DMatrix<f64> {
        let p = &self.projector;
        let n = p.nrows();
        let re = p.map(|z| z.re);
        let im = p.map(|z| z.im);
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&re);
        m.view_mut((n, n), (n, n)).copy_from(&re);
        m.view_mut((0, n), (n, n)).copy_from(&(-&im));
        m.view_mut((n, 0), (n, n)).copy_from(&im);
        m
    }

    /// `max |P² − P|`.
    pub fn idempotency_residual(&self) -> f64 {
        max_abs_c(&(&self.projector * &self.projector - &self.projector))
    }

    /// `max |[U, P]|` for a real evolution matrix `U`.
    pub fn commutator_residual(&self, u: &DMatrix<f64>) -> f64 {
        let u = to_complex(u);
        max_abs_c(&(&u * &self.projector - &self.projector * &u))
    }

    /// `⟨x, y⟩ = −i Ω^ℂ(x̄, y)` on the complexification.
    pub fn doubled_inner(&self, x: &CVector, y: &CVector) -> Complex64 {
        let omega = to_complex(&omega_matrix(self.jtilde.lattice()));
        let v = x.map(|z| z.conj()).transpose() * omega * y;
        Complex64::new(0.0, -1.0) * v[(0, 0)]
    }

    /// `2⟨Pη, Pη′⟩`.
    pub fn projected_inner_product(&self, eta: &PhaseVector, eta2: &PhaseVector) -> Result<Complex64> {
        same_lattice(self.jtilde.lattice(), eta.lattice())?;
        same_lattice(self.jtilde.lattice(), eta2.lattice())?;
        let px = &self.projector * to_complex(&DMatrix::from_column_slice(eta.dim(), 1, eta.coords().as_slice()));
        let py = &self.projector * to_complex(&DMatrix::from_column_slice(eta2.dim(), 1, eta2.coords().as_slice()));
        let px = CVector::from_column_slice(px.as_slice());
        let py = CVector::from_column_slice(py.as_slice());
        Ok(self.doubled_inner(&px, &py) * 2.0)
    }
}

/// Builds `P` from the eigenvectors of `Ĥ` with eigenvalues `+iω`, `ω > 0`.
pub fn positive_frequency_split(generator: &GeneratorOperator) -> Result<ComplexificationSplit> {
    let f = energy_frame(generator)?;
    let dim = f.a.nrows();
    // iA is Hermitian; A v = iω v  ⇔  (iA) v = −ω v.
    let ia = to_complex(&f.a) * Complex64::new(0.0, 1.0);
    let (values, vectors) = sorted_hermitian_eigen(&ia);
    let half = dim / 2;
    let gap = values[half - 1].abs().min(values[half].abs());
    if values[half - 1] >= 0.0 || values[half] <= 0.0 || gap <= 1e-12 * values.amax() {
        return Err(Error::Validation(format!(
            "generator has a zero mode (smallest |frequency| {gap:e})"
        )));
    }
    let mut q = CMatrix::zeros(dim, dim);
    for c in 0..half {
        let v = vectors.column(c);
        q += v * v.adjoint();
    }
    let projector = to_complex(&f.inv_sqrt_k) * q * to_complex(&f.sqrt_k);
    // P = ½(1 − iJ̃)  ⇒  J̃ = i(2P − 1)
    let jt = (&projector * Complex64::new(2.0, 0.0) - CMatrix::identity(dim, dim))
        * Complex64::new(0.0, 1.0);
    let imag = jt.iter().fold(0.0_f64, |a, z| a.max(z.im.abs()));
    let scale = jt.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
    if imag > 1e-10 * scale {
        return Err(Error::Validation(format!(
            "projector does not encode a real complex structure (imaginary residual {imag:e})"
        )));
    }
    let jtilde = ComplexStructure::new(generator.lattice().clone(), jt.map(|z| z.re))?;
    Ok(ComplexificationSplit { projector, jtilde })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_dynamics::{build_generator, evolve_linear, QuadraticHamiltonian};

    fn oscillator_generator(omega: f64) -> GeneratorOperator {
        let l = Arc::new(SpatialLattice::uniform(1, 1.0).unwrap());
        build_generator(&QuadraticHamiltonian::klein_gordon_chain(l, omega, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn oscillator_polar_structure() {
        let g = oscillator_generator(2.0);
        let modulus = generator_modulus(&g).unwrap();
        assert!(max_abs(&(modulus - DMatrix::identity(2, 2) * 2.0)) < 1e-14);
        let j = polar_complex_structure(&g).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, -2.0, 0.0]);
        assert!(max_abs(&(j.matrix() - expected)) < 1e-14);
        assert!(j.report().passed());
    }

    #[test]
    fn oscillator_inner_product_value() {
        let g = oscillator_generator(2.0);
        let j = polar_complex_structure(&g).unwrap();
        let eta = PhaseVector::from_parts(j.lattice().clone(), vec![1.0], vec![0.0]).unwrap();
        let v = induced_inner_product(&j, &eta, &eta).unwrap();
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn indefinite_hamiltonian_is_rejected() {
        let l = Arc::new(SpatialLattice::uniform(1, 1.0).unwrap());
        let k = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let g = build_generator(&QuadraticHamiltonian::new(l.clone(), k).unwrap()).unwrap();
        match polar_complex_structure(&g) {
            Err(Error::NotPositiveDefinite { eigenvalue }) => assert_eq!(eigenvalue, -1.0),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
        assert!(positive_frequency_split(&g).is_err());
        let singular = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let g = build_generator(&QuadraticHamiltonian::new(l, singular).unwrap()).unwrap();
        assert!(matches!(
            polar_complex_structure(&g),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn compatibility_examples() {
        let l = Arc::new(SpatialLattice::uniform(2, 1.0).unwrap());
        let j0 = ComplexStructure::standard(l.clone());
        assert!(check_compatibility(&l, j0.matrix(), 1e-12).unwrap().passed());

        let flipped = -j0.matrix();
        let r = check_compatibility(&l, &flipped, 1e-12).unwrap();
        assert!(r.complex.passed && r.symplectic.passed && !r.positive.passed);

        // conjugate by a non-symplectic shear φ₂ += s φ₁
        let mut s = DMatrix::identity(4, 4);
        s[(1, 0)] = 0.3;
        let conj = &s * j0.matrix() * s.clone().try_inverse().unwrap();
        let r = check_compatibility(&l, &conj, 1e-12).unwrap();
        assert!(r.complex.passed, "{r:?}");
        assert!(!r.symplectic.passed, "{r:?}");
        assert!(r.positive.passed, "{r:?}");
    }

    #[test]
    fn split_matches_polar_on_oscillator() {
        let g = oscillator_generator(2.0);
        let j = polar_complex_structure(&g).unwrap();
        let split = positive_frequency_split(&g).unwrap();
        assert!(max_abs(&(split.jtilde().matrix() - j.matrix())) < 1e-10);
        assert!(split.idempotency_residual() < 1e-12);
        assert!(max_abs(&(split.real_block() - split.realified_projector())) < 1e-12);
    }

    #[test]
    fn frame_has_half_dimension() {
        let l = Arc::new(SpatialLattice::new(vec![0.5, 1.0, 2.0], vec![vec![0, 1, 2]]).unwrap());
        let h = QuadraticHamiltonian::klein_gordon_chain(l, 1.3, 0.7).unwrap();
        let g = build_generator(&h).unwrap();
        let j = polar_complex_structure(&g).unwrap();
        assert_eq!(j.complex_dimension(), 3);
        let u = evolve_linear(&g, 0.9);
        assert!(j.commutator_residual(&u) < 1e-10);
    }
}
