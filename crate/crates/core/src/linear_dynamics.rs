//! Quadratic Hamiltonians, their generators `Ĥ` and linear evolution
//! `U(t) = exp(Ĥt)`, plus a Störmer–Verlet integrator used as an
//! independent route to the same trajectories.
//!
//! Sign convention: `Ĥη = ω(∇H)`, so on one site with `H = ½(π² + ω²φ²)`
//! the generator is `[[0, 1], [−ω², 0]]` and `H(η) = ½ Ω(Ĥη, η)`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lattice::{same_lattice, SpatialLattice};
use crate::linalg::{asymmetry, expm, max_abs};
use crate::symplectic::{omega_matrix, poisson_tensor, PhaseVector};

/// `H(η) = ½ ηᵀ K η` in flat phase coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    lattice: Arc<SpatialLattice>,
    form: DMatrix<f64>,
}

impl QuadraticHamiltonian {
    pub fn new(lattice: Arc<SpatialLattice>, form: DMatrix<f64>) -> Result<Self> {
        let dim = 2 * lattice.site_count();
        if form.nrows() != dim || form.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: form.nrows().max(form.ncols()),
            });
        }
        let asym = asymmetry(&form);
        if asym > 1e-12 * max_abs(&form).max(1.0) {
            return Err(Error::Validation(format!(
                "Hamiltonian form is not symmetric (residual {asym:e})"
            )));
        }
        Ok(Self { lattice, form })
    }

    pub fn zero(lattice: Arc<SpatialLattice>) -> Self {
        let dim = 2 * lattice.site_count();
        Self {
            lattice,
            form: DMatrix::zeros(dim, dim),
        }
    }

    /// Lattice Klein–Gordon chain
    /// `H = ½ Σᵢ μᵢ [πᵢ² + m² φᵢ² + ((φᵢ₊₁ − φᵢ)/a)²]`
    /// with periodic wrap. A single site has no gradient term.
    pub fn klein_gordon_chain(lattice: Arc<SpatialLattice>, mass: f64, spacing: f64) -> Result<Self> {
        if spacing <= 0.0 {
            return Err(Error::Validation("lattice spacing must be positive".into()));
        }
        let n = lattice.site_count();
        let mut k = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            let w = lattice.weight(i);
            k[(n + i, n + i)] += w;
            k[(i, i)] += w * mass * mass;
            if n > 1 {
                let j = (i + 1) % n;
                let c = w / (spacing * spacing);
                k[(i, i)] += c;
                k[(j, j)] += c;
                k[(i, j)] -= c;
                k[(j, i)] -= c;
            }
        }
        Self::new(lattice, k)
    }

    pub fn lattice(&self) -> &Arc<SpatialLattice> {
        &self.lattice
    }

    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    pub fn energy_coords(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.form * x))
    }

    pub fn energy(&self, eta: &PhaseVector) -> Result<f64> {
        same_lattice(&self.lattice, eta.lattice())?;
        Ok(self.energy_coords(&eta.coords()))
    }

    /// No φ–π cross terms: the Hamiltonian splits into kinetic and potential parts.
    pub fn is_separable(&self) -> bool {
        let n = self.lattice.site_count();
        max_abs(&self.form.view((0, n), (n, n)).into_owned()) == 0.0
    }

    /// Smallest eigenvalue of the form.
    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::sorted_symmetric_eigen(&self.form).0[0]
    }
}

/// `Ĥ` with `dη/dt = Ĥη`; anti-self-adjoint with respect to Ω.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorOperator {
    lattice: Arc<SpatialLattice>,
    matrix: DMatrix<f64>,
}

impl GeneratorOperator {
    pub fn new(lattice: Arc<SpatialLattice>, matrix: DMatrix<f64>) -> Result<Self> {
        let dim = 2 * lattice.site_count();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let g = Self { lattice, matrix };
        let r = g.adjointness_residual();
        if r > 1e-12 * max_abs(&g.matrix).max(1.0) {
            return Err(Error::Validation(format!(
                "generator is not anti-self-adjoint with respect to Ω (residual {r:e})"
            )));
        }
        Ok(g)
    }

    pub fn lattice(&self) -> &Arc<SpatialLattice> {
        &self.lattice
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `max |ΩĤ + ĤᵀΩ|`: zero iff `Ω(Ĥη, η′) = −Ω(η, Ĥη′)`.
    pub fn adjointness_residual(&self) -> f64 {
        let omega = omega_matrix(&self.lattice);
        max_abs(&(&omega * &self.matrix + self.matrix.transpose() * &omega))
    }

    /// Recovers the Hamiltonian form `K = −ΩĤ`.
    pub fn hamiltonian_form(&self) -> DMatrix<f64> {
        let omega = omega_matrix(&self.lattice);
        let k = -(&omega * &self.matrix);
        (&k + k.transpose()) * 0.5
    }

    pub fn hamiltonian(&self) -> Result<QuadraticHamiltonian> {
        QuadraticHamiltonian::new(self.lattice.clone(), self.hamiltonian_form())
    }
}

/// Raises an index of `H_AB` with the Poisson tensor: `Ĥ = P K`.
pub fn build_generator(h: &QuadraticHamiltonian) -> Result<GeneratorOperator> {
    let p = poisson_tensor(&h.lattice);
    GeneratorOperator::new(h.lattice.clone(), p * &h.form)
}

/// `U(t) = exp(Ĥt)`.
pub fn evolve_linear(generator: &GeneratorOperator, t: f64) -> DMatrix<f64> {
    expm(&(generator.matrix() * t))
}

/// Sampled trajectory in flat coordinates.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn endpoint(&self) -> &DVector<f64> {
        self.states.last().expect("trajectories hold at least the initial state")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Step count and final partial step for integrating to `t` in steps of `dt`.
pub(crate) fn step_plan(t: f64, dt: f64) -> Result<(usize, f64)> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::StepGuard(format!("time step must be positive, got {dt}")));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::StepGuard(format!("integration time must be nonnegative, got {t}")));
    }
    let ratio = t / dt;
    let full = (ratio + 1e-9).floor();
    let rest = t - full * dt;
    let rest = if rest.abs() <= 1e-12 * t.max(dt) { 0.0 } else { rest };
    Ok((full as usize, rest))
}

/// Störmer–Verlet (kick–drift–kick) on `dη/dt = Ω∇H` for a separable quadratic
/// Hamiltonian.
pub fn integrate_hamilton(
    h: &QuadraticHamiltonian,
    eta0: &PhaseVector,
    t: f64,
    dt: f64,
) -> Result<Trajectory> {
    same_lattice(&h.lattice, eta0.lattice())?;
    if !h.is_separable() {
        return Err(Error::Validation(
            "Störmer–Verlet needs a Hamiltonian without φ–π cross terms".into(),
        ));
    }
    let (steps, rest) = step_plan(t, dt)?;
    let n = h.lattice.site_count();
    let inv_mu = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        h.lattice.weights().iter().map(|w| 1.0 / w),
    ));
    // dφ/dt = M⁻¹ K_ππ π,  dπ/dt = −M⁻¹ K_φφ φ
    let drift = &inv_mu * h.form.view((n, n), (n, n));
    let force = -(&inv_mu * h.form.view((0, 0), (n, n)));

    let x0 = eta0.coords();
    let mut phi = x0.rows(0, n).into_owned();
    let mut pi = x0.rows(n, n).into_owned();
    let mut time = 0.0;
    let mut out = Trajectory {
        times: vec![0.0],
        states: vec![x0],
    };
    let step = |phi: &mut DVector<f64>, pi: &mut DVector<f64>, tau: f64| {
        *pi += &force * &*phi * (0.5 * tau);
        *phi += &drift * &*pi * tau;
        *pi += &force * &*phi * (0.5 * tau);
    };
    let pack = |phi: &DVector<f64>, pi: &DVector<f64>| {
        DVector::from_iterator(2 * n, phi.iter().chain(pi.iter()).copied())
    };
    for k in 1..=steps {
        step(&mut phi, &mut pi, dt);
        time = k as f64 * dt;
        out.times.push(time);
        out.states.push(pack(&phi, &pi));
    }
    if rest > 0.0 {
        step(&mut phi, &mut pi, rest);
        out.times.push(time + rest);
        out.states.push(pack(&phi, &pi));
    }
    Ok(out)
}
