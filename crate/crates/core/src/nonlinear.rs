//! Lattice φ⁴ dynamics.
//!
//! `H = ½Σμπ² + ½Σμ((φᵢ₊₁ − φᵢ)/a)² + ½m²Σμφ² + λΣμφ⁴` on a periodic chain,
//! evolved by `dη/dt = ω(∇H)`, i.e. `dφ/dt = π`, `dπᵢ/dt = −μᵢ⁻¹ ∂V/∂φᵢ`,
//! with kick–drift–kick Störmer–Verlet.

use std::cell::RefCell;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{same_lattice, SpatialLattice};
use crate::linear_dynamics::{step_plan, Trajectory};
use crate::symplectic::{finite_difference_jacobian, omega_matrix, pullback_residual, PhaseVector};

/// `‖η‖` beyond which evolution is abandoned as singular.
pub const BLOW_UP_NORM: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldParameters {
    pub mass: f64,
    pub coupling: f64,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldHamiltonian {
    lattice: Arc<SpatialLattice>,
    params: FieldParameters,
}

impl FieldHamiltonian {
    pub fn new(lattice: Arc<SpatialLattice>, mass: f64, coupling: f64, spacing: f64) -> Result<Self> {
        if !spacing.is_finite() || spacing <= 0.0 {
            return Err(Error::Validation(format!("spacing must be positive, got {spacing}")));
        }
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::Validation(format!("mass must be nonnegative, got {mass}")));
        }
        if !coupling.is_finite() {
            return Err(Error::Validation("coupling must be finite".into()));
        }
        Ok(Self {
            lattice,
            params: FieldParameters {
                mass,
                coupling,
                spacing,
            },
        })
    }

    pub fn lattice(&self) -> &Arc<SpatialLattice> {
        &self.lattice
    }

    pub fn parameters(&self) -> FieldParameters {
        self.params
    }

    fn neighbor(&self, i: usize) -> Option<usize> {
        let n = self.lattice.site_count();
        (n > 1).then(|| (i + 1) % n)
    }

    pub fn kinetic(&self, pi: &[f64]) -> f64 {
        0.5 * self.lattice.weights().iter().zip(pi).map(|(w, p)| w * p * p).sum::<f64>()
    }

    pub fn potential(&self, phi: &[f64]) -> f64 {
        let FieldParameters {
            mass,
            coupling,
            spacing,
        } = self.params;
        let mut v = 0.0;
        for (i, (&w, &f)) in self.lattice.weights().iter().zip(phi).enumerate() {
            if let Some(j) = self.neighbor(i) {
                let g = (phi[j] - f) / spacing;
                v += 0.5 * w * g * g;
            }
            v += 0.5 * mass * mass * w * f * f + coupling * w * f.powi(4);
        }
        v
    }

    /// `∂V/∂φᵢ`.
    pub fn potential_gradient(&self, phi: &[f64]) -> DVector<f64> {
        let FieldParameters {
            mass,
            coupling,
            spacing,
        } = self.params;
        let n = phi.len();
        let mut g = DVector::zeros(n);
        let inv_a2 = 1.0 / (spacing * spacing);
        for (i, &w) in self.lattice.weights().iter().enumerate() {
            let f = phi[i];
            if let Some(j) = self.neighbor(i) {
                let c = w * (phi[j] - f) * inv_a2;
                g[i] -= c;
                g[j] += c;
            }
            g[i] += mass * mass * w * f + 4.0 * coupling * w * f.powi(3);
        }
        g
    }

    /// `−μᵢ⁻¹ ∂V/∂φᵢ`.
    fn force(&self, phi: &DVector<f64>) -> DVector<f64> {
        let mut g = self.potential_gradient(phi.as_slice());
        for (gi, w) in g.iter_mut().zip(self.lattice.weights()) {
            *gi = -*gi / w;
        }
        g
    }

    pub fn energy_coords(&self, x: &DVector<f64>) -> f64 {
        let n = self.lattice.site_count();
        self.kinetic(&x.as_slice()[n..]) + self.potential(&x.as_slice()[..n])
    }

    pub fn energy(&self, eta: &PhaseVector) -> Result<f64> {
        same_lattice(&self.lattice, eta.lattice())?;
        Ok(self.energy_coords(&eta.coords()))
    }

    /// `Σ μᵢ πᵢ (φᵢ₊₁ − φᵢ₋₁)/(2a)`, the generator of translations that
    /// commute with the quadratic part of `H` on a uniform periodic chain.
    pub fn lattice_momentum(&self, x: &DVector<f64>) -> f64 {
        let n = self.lattice.site_count();
        if n < 2 {
            return 0.0;
        }
        (0..n)
            .map(|i| {
                let next = x[(i + 1) % n];
                let prev = x[(i + n - 1) % n];
                self.lattice.weight(i) * x[n + i] * (next - prev) / (2.0 * self.params.spacing)
            })
            .sum()
    }
}

/// Integrates to time `t` (negative `t` runs backward) with step `dt`,
/// recording every step. Guards: `0 < dt ≤ a/2` and `‖η‖ ≤ 1e8`.
pub fn nonlinear_evolve(h: &FieldHamiltonian, eta0: &PhaseVector, t: f64, dt: f64) -> Result<Trajectory> {
    same_lattice(&h.lattice, eta0.lattice())?;
    evolve_coords(h, eta0.coords(), t, dt, true)
}

fn evolve_coords(
    h: &FieldHamiltonian,
    x0: DVector<f64>,
    t: f64,
    dt: f64,
    record: bool,
) -> Result<Trajectory> {
    if dt > 0.5 * h.params.spacing {
        return Err(Error::StepGuard(format!(
            "dt = {dt} exceeds half the lattice spacing ({})",
            0.5 * h.params.spacing
        )));
    }
    let (steps, rest) = step_plan(t.abs(), dt)?;
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    let n = h.lattice.site_count();
    let mut phi = x0.rows(0, n).into_owned();
    let mut pi = x0.rows(n, n).into_owned();
    let mut out = Trajectory {
        times: vec![0.0],
        states: vec![x0],
    };
    let pack = |phi: &DVector<f64>, pi: &DVector<f64>| {
        DVector::from_iterator(2 * n, phi.iter().chain(pi.iter()).copied())
    };
    let mut force = h.force(&phi);
    let mut time = 0.0;
    let plan = std::iter::repeat_n(dt, steps).chain((rest > 0.0).then_some(rest));
    let total = steps + usize::from(rest > 0.0);
    for (k, tau) in plan.enumerate() {
        let tau = sign * tau;
        pi.axpy(0.5 * tau, &force, 1.0);
        phi.axpy(tau, &pi, 1.0);
        force = h.force(&phi);
        pi.axpy(0.5 * tau, &force, 1.0);
        time += tau;
        let norm = (phi.norm_squared() + pi.norm_squared()).sqrt();
        if norm.is_nan() || norm > BLOW_UP_NORM {
            return Err(Error::SingularTrajectory { time, norm });
        }
        if record || k + 1 == total {
            out.times.push(time);
            out.states.push(pack(&phi, &pi));
        }
    }
    Ok(out)
}

/// Endpoint of the discrete flow without storing the trajectory.
pub fn nonlinear_flow(h: &FieldHamiltonian, x0: &DVector<f64>, t: f64, dt: f64) -> Result<DVector<f64>> {
    Ok(evolve_coords(h, x0.clone(), t, dt, false)?.endpoint().clone())
}

/// `max |DΦᵀ Ω DΦ − Ω|` for the time-`t` flow map at `η₀`, with `DΦ` from
/// centered finite differences.
pub fn flow_symplecticity(h: &FieldHamiltonian, eta0: &PhaseVector, t: f64, dt: f64) -> Result<f64> {
    same_lattice(&h.lattice, eta0.lattice())?;
    let x0 = eta0.coords();
    // surface guard violations before differentiating
    nonlinear_flow(h, &x0, t, dt)?;
    let failure = RefCell::new(None);
    let jac = finite_difference_jacobian(
        |y| match nonlinear_flow(h, y, t, dt) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                DVector::from_element(y.len(), f64::NAN)
            }
        },
        &x0,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(pullback_residual(&omega_matrix(&h.lattice), &jac))
}
