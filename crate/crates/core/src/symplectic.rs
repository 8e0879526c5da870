//! Phase space `Φ = 𝓕 × 𝓕`, the symplectic form, the ω map, Poisson
//! brackets and symplectomorphism diagnostics.
//!
//! Dual vectors are represented by phase vectors through the weighted pairing
//! `ψ(η) = Σᵢ μᵢ (ψ_φᵢ φᵢ + ψ_πᵢ πᵢ)`, so the form on Φ and the form on Φ*
//! are the same expression `Ω(η,η′) = Σᵢ μᵢ (φᵢ π′ᵢ − πᵢ φ′ᵢ)`. In flat
//! coordinates `x = (φ₁..φₙ, π₁..πₙ)` that is `xᵀ Ω x′` with
//! `Ω = [[0, M], [−M, 0]]`, `M = diag(μ)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{same_lattice, FieldFunction, SpatialLattice};
use crate::linalg::max_abs;
use crate::poly::{Polynomial, PolynomialMap};

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    phi: FieldFunction,
    pi: FieldFunction,
}

impl PhaseVector {
    pub fn new(phi: FieldFunction, pi: FieldFunction) -> Result<Self> {
        same_lattice(phi.lattice(), pi.lattice())?;
        phi.real_values()?;
        pi.real_values()?;
        Ok(Self { phi, pi })
    }

    pub fn from_parts(lattice: Arc<SpatialLattice>, phi: Vec<f64>, pi: Vec<f64>) -> Result<Self> {
        Self::new(
            FieldFunction::real(lattice.clone(), phi)?,
            FieldFunction::real(lattice, pi)?,
        )
    }

    /// From flat coordinates `(φ₁..φₙ, π₁..πₙ)`.
    pub fn from_coords(lattice: Arc<SpatialLattice>, x: &DVector<f64>) -> Result<Self> {
        let n = lattice.site_count();
        if x.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: x.len(),
            });
        }
        Self::from_parts(
            lattice,
            x.rows(0, n).iter().copied().collect(),
            x.rows(n, n).iter().copied().collect(),
        )
    }

    pub fn zeros(lattice: Arc<SpatialLattice>) -> Self {
        Self {
            phi: FieldFunction::zeros(lattice.clone()),
            pi: FieldFunction::zeros(lattice),
        }
    }

    pub fn lattice(&self) -> &Arc<SpatialLattice> {
        self.phi.lattice()
    }

    pub fn phi(&self) -> &FieldFunction {
        &self.phi
    }

    pub fn pi(&self) -> &FieldFunction {
        &self.pi
    }

    pub fn phi_values(&self) -> &[f64] {
        self.phi.real_values().expect("phase vectors are real")
    }

    pub fn pi_values(&self) -> &[f64] {
        self.pi.real_values().expect("phase vectors are real")
    }

    pub fn coords(&self) -> DVector<f64> {
        DVector::from_iterator(
            2 * self.phi.len(),
            self.phi_values().iter().chain(self.pi_values()).copied(),
        )
    }

    pub fn dim(&self) -> usize {
        2 * self.phi.len()
    }
}

/// Matrix of Ω in flat phase coordinates.
pub fn omega_matrix(lattice: &SpatialLattice) -> DMatrix<f64> {
    let n = lattice.site_count();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (i, &w) in lattice.weights().iter().enumerate() {
        m[(i, n + i)] = w;
        m[(n + i, i)] = -w;
    }
    m
}

/// Poisson tensor in flat coordinates: `{f,g} = ∂fᵀ P ∂g` with
/// `P = [[0, M⁻¹], [−M⁻¹, 0]]`. Equals `−Ω⁻¹`.
pub fn poisson_tensor(lattice: &SpatialLattice) -> DMatrix<f64> {
    let n = lattice.site_count();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (i, &w) in lattice.weights().iter().enumerate() {
        m[(i, n + i)] = 1.0 / w;
        m[(n + i, i)] = -1.0 / w;
    }
    m
}

/// `Ω(x, y)` on flat coordinates.
pub fn omega_coords(lattice: &SpatialLattice, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    let n = lattice.site_count();
    lattice
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| w * (x[i] * y[n + i] - x[n + i] * y[i]))
        .sum()
}

/// `Ω(η,η′) = Σᵢ μᵢ (φᵢ π′ᵢ − πᵢ φ′ᵢ)`.
pub fn omega(eta: &PhaseVector, eta2: &PhaseVector) -> Result<f64> {
    same_lattice(eta.lattice(), eta2.lattice())?;
    Ok(omega_coords(eta.lattice(), &eta.coords(), &eta2.coords()))
}

/// `ω((φ, π)) = (π, −φ)`: the vector with `ψ(ω(η)) = Ω(ψ, η)` for every dual ψ.
pub fn omega_map(eta: &PhaseVector) -> PhaseVector {
    PhaseVector {
        phi: eta.pi.clone(),
        pi: FieldFunction::real(
            eta.lattice().clone(),
            eta.phi_values().iter().map(|x| -x).collect(),
        )
        .expect("same lattice"),
    }
}

/// The weighted pairing `ψ(η)` of a dual vector with a phase vector.
pub fn pair(psi: &PhaseVector, eta: &PhaseVector) -> Result<f64> {
    same_lattice(psi.lattice(), eta.lattice())?;
    let lattice = eta.lattice();
    Ok((0..lattice.site_count())
        .map(|i| {
            lattice.weight(i)
                * (psi.phi_values()[i] * eta.phi_values()[i] + psi.pi_values()[i] * eta.pi_values()[i])
        })
        .sum())
}

type ValueFn = dyn Fn(&DVector<f64>) -> f64 + Send + Sync;
type GradientFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;

/// Real observable on phase space. The optional gradient returns coordinate
/// partial derivatives `∂f/∂xᴬ`.
#[derive(Clone)]
pub struct Observable {
    value: Arc<ValueFn>,
    gradient: Option<Arc<GradientFn>>,
}

impl std::fmt::Debug for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Observable")
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl Observable {
    pub fn new(value: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            gradient: None,
        }
    }

    pub fn with_gradient(
        value: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            gradient: Some(Arc::new(gradient)),
        }
    }

    /// Real polynomial observable with its analytic gradient.
    pub fn polynomial(p: Polynomial) -> Result<Self> {
        if !p.is_real() {
            return Err(Error::Validation(
                "observable polynomials must have real coefficients".into(),
            ));
        }
        let grads: Vec<Polynomial> = (0..p.nvars()).map(|v| p.derivative(v)).collect();
        Ok(Self::with_gradient(
            move |x| p.eval(x.as_slice()).re,
            move |x| DVector::from_iterator(grads.len(), grads.iter().map(|g| g.eval(x.as_slice()).re)),
        ))
    }

    /// Coordinate observable `φ_site`.
    pub fn field_at(lattice: &SpatialLattice, site: usize) -> Self {
        let mut c = vec![0.0; 2 * lattice.site_count()];
        c[site] = 1.0;
        Self::polynomial(Polynomial::linear(&c)).expect("real coefficients")
    }

    /// Coordinate observable `π_site`.
    pub fn momentum_at(lattice: &SpatialLattice, site: usize) -> Self {
        let n = lattice.site_count();
        let mut c = vec![0.0; 2 * n];
        c[n + site] = 1.0;
        Self::polynomial(Polynomial::linear(&c)).expect("real coefficients")
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        (self.value)(x)
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Coordinate gradient: analytic when available, else centered finite
    /// differences with step `h = 1e-5 (1 + ‖x‖)`.
    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let g = match &self.gradient {
            Some(g) => g(x),
            None => {
                let h = 1e-5 * (1.0 + x.norm());
                let mut g = DVector::zeros(x.len());
                let mut probe = x.clone();
                for a in 0..x.len() {
                    probe[a] = x[a] + h;
                    let up = self.eval(&probe);
                    probe[a] = x[a] - h;
                    let down = self.eval(&probe);
                    probe[a] = x[a];
                    g[a] = (up - down) / (2.0 * h);
                }
                g
            }
        };
        if g.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: g.len(),
            });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonDifferentiable(
                "gradient has non-finite components".into(),
            ));
        }
        Ok(g)
    }
}

/// `{f,g}(η) = Ω(∇f, ∇g)`, gradients taken as dual vectors through the
/// weighted pairing (site `i` components carry `1/μᵢ`).
pub fn poisson_bracket(f: &Observable, g: &Observable, eta: &PhaseVector) -> Result<f64> {
    let x = eta.coords();
    let df = f.gradient(&x)?;
    let dg = g.gradient(&x)?;
    Ok(poisson_from_partials(eta.lattice(), &df, &dg))
}

pub(crate) fn poisson_from_partials(
    lattice: &SpatialLattice,
    df: &DVector<f64>,
    dg: &DVector<f64>,
) -> f64 {
    let n = lattice.site_count();
    lattice
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| (df[i] * dg[n + i] - df[n + i] * dg[i]) / w)
        .sum()
}

type ApplyFn = dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync;
type DerivativeFn = dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync;

/// A (candidate) symplectomorphism of flat phase coordinates. Closures must
/// be stateless.
#[derive(Clone)]
pub struct SymplecticMap {
    dim: usize,
    apply: Arc<ApplyFn>,
    derivative: Option<Arc<DerivativeFn>>,
    linear: Option<DMatrix<f64>>,
}

impl std::fmt::Debug for SymplecticMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymplecticMap")
            .field("dim", &self.dim)
            .field("is_linear", &self.is_linear())
            .finish()
    }
}

impl SymplecticMap {
    pub fn identity(dim: usize) -> Self {
        Self::linear(DMatrix::identity(dim, dim))
    }

    pub fn linear(matrix: DMatrix<f64>) -> Self {
        assert!(matrix.is_square(), "linear maps of phase space are square");
        let m = matrix.clone();
        let d = matrix.clone();
        Self {
            dim: matrix.nrows(),
            apply: Arc::new(move |x| &m * x),
            derivative: Some(Arc::new(move |_| d.clone())),
            linear: Some(matrix),
        }
    }

    pub fn nonlinear(
        dim: usize,
        apply: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
        derivative: Option<Box<DerivativeFn>>,
    ) -> Self {
        Self {
            dim,
            apply: Arc::new(apply),
            derivative: derivative.map(Arc::from),
            linear: None,
        }
    }

    /// Polynomial map with analytic Jacobian. Linear polynomial maps become
    /// matrix maps.
    pub fn polynomial(map: PolynomialMap) -> Self {
        if map.is_linear() {
            let x0 = DVector::zeros(map.input_dim());
            return Self::linear(map.jacobian(&x0));
        }
        let dim = map.input_dim();
        let jac = map.clone();
        Self {
            dim,
            apply: Arc::new(move |x| map.apply(x)),
            derivative: Some(Arc::new(move |x| jac.jacobian(x))),
            linear: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_linear(&self) -> bool {
        self.linear.is_some()
    }

    pub fn matrix(&self) -> Option<&DMatrix<f64>> {
        self.linear.as_ref()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.apply)(x)
    }

    /// Jacobian at `x`: closed form when available, centered finite
    /// differences otherwise.
    pub fn derivative(&self, x: &DVector<f64>) -> DMatrix<f64> {
        if let Some(d) = &self.derivative {
            return d(x);
        }
        finite_difference_jacobian(|y| self.apply(y), x)
    }
}

/// Centered-difference Jacobian with step `1e-5 (1 + ‖x‖)`.
pub fn finite_difference_jacobian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
) -> DMatrix<f64> {
    let h = 1e-5 * (1.0 + x.norm());
    let mut probe = x.clone();
    let mut cols = Vec::with_capacity(x.len());
    for a in 0..x.len() {
        probe[a] = x[a] + h;
        let up = f(&probe);
        probe[a] = x[a] - h;
        let down = f(&probe);
        probe[a] = x[a];
        cols.push((up - down) / (2.0 * h));
    }
    DMatrix::from_columns(&cols)
}

/// `max |DUᵀ Ω DU − Ω|`.
pub fn pullback_residual(omega: &DMatrix<f64>, jacobian: &DMatrix<f64>) -> f64 {
    max_abs(&(jacobian.transpose() * omega * jacobian - omega))
}

#[derive(Debug, Clone, Serialize)]
pub struct SymplecticityReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `DU Ω DUᵀ`-preservation (in the equivalent form `DUᵀ Ω DU = Ω`)
/// at every sample.
pub fn is_symplectomorphism(
    map: &SymplecticMap,
    lattice: &SpatialLattice,
    samples: &[PhaseVector],
    tol: f64,
) -> Result<SymplecticityReport> {
    let omega = omega_matrix(lattice);
    if map.dim() != omega.nrows() {
        return Err(Error::DimensionMismatch {
            expected: omega.nrows(),
            found: map.dim(),
        });
    }
    let residuals: Vec<f64> = samples
        .iter()
        .map(|s| pullback_residual(&omega, &map.derivative(&s.coords())))
        .collect();
    let max_residual = residuals.iter().fold(0.0_f64, |a, &r| a.max(r));
    Ok(SymplecticityReport {
        passed: max_residual <= tol,
        residuals,
        max_residual,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_site(weight: f64) -> Arc<SpatialLattice> {
        Arc::new(SpatialLattice::uniform(1, weight).unwrap())
    }

    #[test]
    fn omega_unit_pair() {
        let l = one_site(1.0);
        let a = PhaseVector::from_parts(l.clone(), vec![1.0], vec![0.0]).unwrap();
        let b = PhaseVector::from_parts(l, vec![0.0], vec![1.0]).unwrap();
        assert_eq!(omega(&a, &b).unwrap(), 1.0);
        assert_eq!(omega(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn omega_map_examples() {
        let l = one_site(1.0);
        let a = PhaseVector::from_parts(l, vec![1.0], vec![0.0]).unwrap();
        let w = omega_map(&a);
        assert_eq!(w.phi_values(), &[0.0]);
        assert_eq!(w.pi_values(), &[-1.0]);
        let ww = omega_map(&w);
        assert_eq!(ww.coords(), -a.coords());
    }

    #[test]
    fn omega_matrix_is_nondegenerate() {
        let l = SpatialLattice::new(vec![0.3, 1.0, 2.5], vec![vec![0, 1, 2]]).unwrap();
        let m = omega_matrix(&l);
        assert_eq!(m.clone().rank(1e-12), 6);
        let p = poisson_tensor(&l);
        assert!(max_abs(&(&p + m.try_inverse().unwrap())) < 1e-14);
    }

    #[test]
    fn lattice_mismatch_is_an_error() {
        let a = PhaseVector::zeros(one_site(1.0));
        let b = PhaseVector::zeros(one_site(2.0));
        assert!(matches!(omega(&a, &b), Err(Error::LatticeMismatch)));
    }

    #[test]
    fn bracket_of_coordinates_is_discrete_delta() {
        let l = Arc::new(SpatialLattice::new(vec![0.25, 2.0], vec![vec![0], vec![1]]).unwrap());
        let eta = PhaseVector::zeros(l.clone());
        for x in 0..2 {
            let b = poisson_bracket(
                &Observable::field_at(&l, x),
                &Observable::momentum_at(&l, x),
                &eta,
            )
            .unwrap();
            assert!((b - 1.0 / l.weight(x)).abs() < 1e-15);
            let ff = poisson_bracket(
                &Observable::field_at(&l, x),
                &Observable::field_at(&l, 1 - x),
                &eta,
            )
            .unwrap();
            assert_eq!(ff, 0.0);
        }
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let l = one_site(1.0);
        let eta = PhaseVector::zeros(l);
        let bad = Observable::new(|x| 1.0 / x[0]);
        let ok = Observable::new(|x| x[1]);
        assert!(matches!(
            poisson_bracket(&bad, &ok, &eta),
            Err(Error::NonDifferentiable(_))
        ));
    }

    #[test]
    fn identity_has_zero_residual() {
        let l = one_site(1.0);
        let s = vec![PhaseVector::from_parts(l.clone(), vec![0.3], vec![-1.0]).unwrap()];
        let r = is_symplectomorphism(&SymplecticMap::identity(2), &l, &s, 0.0).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn cubic_shear_is_symplectic_through_finite_differences() {
        let l = one_site(1.0);
        let eps = 0.2;
        let shear = SymplecticMap::nonlinear(
            2,
            move |x| DVector::from_vec(vec![x[0], x[1] + eps * x[0].powi(3)]),
            None,
        );
        let samples: Vec<_> = [-1.0, 0.3, 1.7]
            .iter()
            .map(|&p| PhaseVector::from_parts(l.clone(), vec![p], vec![0.5]).unwrap())
            .collect();
        let r = is_symplectomorphism(&shear, &l, &samples, 1e-8).unwrap();
        assert!(r.passed, "{:?}", r);
        let squeeze_bad = SymplecticMap::linear(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0])));
        assert!(!is_symplectomorphism(&squeeze_bad, &l, &samples, 1e-8).unwrap().passed);
    }
}
