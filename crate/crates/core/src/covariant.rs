//! 1+1D lattice Klein–Gordon field: retarded and advanced propagators, the
//! Pauli–Jordan kernel `R − A`, and the conserved surface form.
//!
//! The field equation is discretized by leapfrog,
//! `φᵗ⁺¹ = 2φᵗ − φᵗ⁻¹ + dt²(Δφᵗ − m²φᵗ + fᵗ)`, with periodic `Δ` on `N` sites
//! of spacing `a` and time slices `t = 0, …, T−1`. A unit point source at
//! `(t₀, x₀)` is `f = δ/(a·dt)`, so the retarded response starts with
//! `φ^{t₀+1}(x₀) = dt/a`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest equation residual accepted for a field history to count as a solution.
pub const SOLUTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacetimeLattice {
    sites: usize,
    steps: usize,
    spacing: f64,
    dt: f64,
}

impl SpacetimeLattice {
    /// `sites` spatial points, `steps` time slices; requires `dt/a ≤ 1`.
    pub fn new(sites: usize, steps: usize, spacing: f64, dt: f64) -> Result<Self> {
        if sites < 2 || steps < 2 {
            return Err(Error::Validation(format!(
                "spacetime lattice needs at least 2 sites and 2 slices, got {sites}×{steps}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite() && dt > 0.0 && dt.is_finite()) {
            return Err(Error::Validation("spacing and dt must be positive".into()));
        }
        if dt / spacing > 1.0 {
            return Err(Error::StepGuard(format!(
                "Courant ratio dt/a = {} exceeds 1",
                dt / spacing
            )));
        }
        Ok(Self {
            sites,
            steps,
            spacing,
            dt,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn courant(&self) -> f64 {
        self.dt / self.spacing
    }

    /// Periodic distance in sites.
    pub fn distance(&self, x: usize, y: usize) -> usize {
        let d = x.abs_diff(y);
        d.min(self.sites - d)
    }

    fn check_event(&self, e: Event) -> Result<()> {
        if e.t >= self.steps {
            return Err(Error::OutOfRange {
                what: "time slice",
                value: e.t,
                min: 0,
                max: self.steps - 1,
            });
        }
        if e.x >= self.sites {
            return Err(Error::OutOfRange {
                what: "site",
                value: e.x,
                min: 0,
                max: self.sites - 1,
            });
        }
        Ok(())
    }

    fn check_history(&self, values: &DMatrix<f64>) -> Result<()> {
        if values.nrows() != self.steps || values.ncols() != self.sites {
            return Err(Error::DimensionMismatch {
                expected: self.steps * self.sites,
                found: values.nrows() * values.ncols(),
            });
        }
        Ok(())
    }

    /// `(Δ − m²)φ` on one slice.
    fn spatial_operator(&self, phi: &DVector<f64>, mass: f64) -> DVector<f64> {
        let n = self.sites;
        let inv_a2 = 1.0 / (self.spacing * self.spacing);
        DVector::from_fn(n, |x, _| {
            let lap = (phi[(x + 1) % n] - 2.0 * phi[x] + phi[(x + n - 1) % n]) * inv_a2;
            lap - mass * mass * phi[x]
        })
    }
}

/// Spacetime event `(t, x)` in slice and site indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Event {
    pub t: usize,
    pub x: usize,
}

impl Event {
    pub fn new(t: usize, x: usize) -> Self {
        Self { t, x }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Retarded,
    Advanced,
}

/// Response of the field to a unit point source, on every event.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorKernel {
    pub kind: KernelKind,
    pub source: Event,
    /// `values[(t, x)]`.
    pub values: DMatrix<f64>,
}

impl PropagatorKernel {
    pub fn value(&self, e: Event) -> f64 {
        self.values[(e.t, e.x)]
    }
}

fn step_forward(lat: &SpacetimeLattice, mass: f64, source: &DMatrix<f64>) -> DMatrix<f64> {
    let (t_count, n) = (lat.steps, lat.sites);
    let dt2 = lat.dt * lat.dt;
    let mut out = DMatrix::zeros(t_count, n);
    let mut prev = DVector::zeros(n);
    let mut cur = DVector::zeros(n);
    for t in 0..t_count - 1 {
        let f = source.row(t).transpose();
        let next = &cur * 2.0 - &prev + (lat.spatial_operator(&cur, mass) + f) * dt2;
        out.set_row(t + 1, &next.transpose());
        prev = cur;
        cur = next;
    }
    out
}

fn step_backward(lat: &SpacetimeLattice, mass: f64, source: &DMatrix<f64>) -> DMatrix<f64> {
    let (t_count, n) = (lat.steps, lat.sites);
    let dt2 = lat.dt * lat.dt;
    let mut out = DMatrix::zeros(t_count, n);
    let mut later = DVector::zeros(n);
    let mut cur = DVector::zeros(n);
    for t in (1..t_count).rev() {
        let f = source.row(t).transpose();
        let earlier = &cur * 2.0 - &later + (lat.spatial_operator(&cur, mass) + f) * dt2;
        out.set_row(t - 1, &earlier.transpose());
        later = cur;
        cur = earlier;
    }
    out
}

fn point_source(lat: &SpacetimeLattice, e: Event) -> DMatrix<f64> {
    let mut f = DMatrix::zeros(lat.steps, lat.sites);
    f[(e.t, e.x)] = 1.0 / (lat.spacing * lat.dt);
    f
}

fn check_mass(mass: f64) -> Result<()> {
    if !mass.is_finite() || mass < 0.0 {
        return Err(Error::Validation(format!("mass must be nonnegative, got {mass}")));
    }
    Ok(())
}

/// Retarded response to a unit source at `source`; zero on and before `source.t`.
pub fn retarded_propagator(lat: &SpacetimeLattice, mass: f64, source: Event) -> Result<PropagatorKernel> {
    check_mass(mass)?;
    lat.check_event(source)?;
    Ok(PropagatorKernel {
        kind: KernelKind::Retarded,
        source,
        values: step_forward(lat, mass, &point_source(lat, source)),
    })
}

/// Advanced response, computed by stepping backward in time from the future edge.
pub fn advanced_propagator(lat: &SpacetimeLattice, mass: f64, source: Event) -> Result<PropagatorKernel> {
    check_mass(mass)?;
    lat.check_event(source)?;
    Ok(PropagatorKernel {
        kind: KernelKind::Advanced,
        source,
        values: step_backward(lat, mass, &point_source(lat, source)),
    })
}

/// `(R − A)(e, source)`.
pub fn pauli_jordan(lat: &SpacetimeLattice, mass: f64, e: Event, source: Event) -> Result<f64> {
    lat.check_event(e)?;
    let r = retarded_propagator(lat, mass, source)?;
    let a = advanced_propagator(lat, mass, source)?;
    Ok(r.value(e) - a.value(e))
}

/// Largest leapfrog residual `|φᵗ⁺¹ − 2φᵗ + φᵗ⁻¹ − dt²(Δ − m²)φᵗ|` over interior slices.
pub fn equation_residual(lat: &SpacetimeLattice, mass: f64, values: &DMatrix<f64>) -> Result<f64> {
    lat.check_history(values)?;
    let dt2 = lat.dt * lat.dt;
    let mut worst = 0.0_f64;
    for t in 1..lat.steps - 1 {
        let cur = values.row(t).transpose();
        let r = values.row(t + 1).transpose() - &cur * 2.0 + values.row(t - 1).transpose()
            - lat.spatial_operator(&cur, mass) * dt2;
        worst = worst.max(r.amax());
    }
    Ok(worst)
}

/// A field history satisfying the source-free discrete equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    lattice: SpacetimeLattice,
    mass: f64,
    values: DMatrix<f64>,
}

impl Solution {
    /// Validates `values` (slices × sites) against the field equation.
    pub fn new(lat: SpacetimeLattice, mass: f64, values: DMatrix<f64>) -> Result<Self> {
        check_mass(mass)?;
        let residual = equation_residual(&lat, mass, &values)?;
        if residual.is_nan() || residual > SOLUTION_TOL {
            return Err(Error::NotASolution { residual });
        }
        Ok(Self {
            lattice: lat,
            mass,
            values,
        })
    }

    /// Evolves the first two slices forward.
    pub fn from_initial_slices(
        lat: SpacetimeLattice,
        mass: f64,
        first: &[f64],
        second: &[f64],
    ) -> Result<Self> {
        check_mass(mass)?;
        if first.len() != lat.sites || second.len() != lat.sites {
            return Err(Error::DimensionMismatch {
                expected: lat.sites,
                found: first.len().min(second.len()),
            });
        }
        let dt2 = lat.dt * lat.dt;
        let mut values = DMatrix::zeros(lat.steps, lat.sites);
        values.set_row(0, &DVector::from_column_slice(first).transpose());
        values.set_row(1, &DVector::from_column_slice(second).transpose());
        for t in 1..lat.steps - 1 {
            let cur = values.row(t).transpose();
            let next = &cur * 2.0 - values.row(t - 1).transpose() + lat.spatial_operator(&cur, mass) * dt2;
            values.set_row(t + 1, &next.transpose());
        }
        Ok(Self {
            lattice: lat,
            mass,
            values,
        })
    }

    pub fn lattice(&self) -> &SpacetimeLattice {
        &self.lattice
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Field and centered time derivative on slice `t` (`1 ≤ t ≤ T−2`).
    pub fn slice_data(&self, t: usize) -> Result<(DVector<f64>, DVector<f64>)> {
        if t == 0 || t + 1 >= self.lattice.steps {
            return Err(Error::OutOfRange {
                what: "surface slice",
                value: t,
                min: 1,
                max: self.lattice.steps.saturating_sub(2),
            });
        }
        let phi = self.values.row(t).transpose();
        let vel = (self.values.row(t + 1) - self.values.row(t - 1)).transpose() / (2.0 * self.lattice.dt);
        Ok((phi, vel))
    }
}

/// `Σₓ a (φ₁ ∂ₜφ₂ − φ₂ ∂ₜφ₁)` on slice `t`, with the centered time
/// difference of the leapfrog stencil.
pub fn surface_form(s1: &Solution, s2: &Solution, t: usize) -> Result<f64> {
    if s1.lattice != s2.lattice || s1.mass != s2.mass {
        return Err(Error::Validation("solutions live on different lattices".into()));
    }
    let (p1, v1) = s1.slice_data(t)?;
    let (p2, v2) = s2.slice_data(t)?;
    Ok(s1.lattice.spacing * (p1.dot(&v2) - p2.dot(&v1)))
}

/// `E f = (R − A) f` for a source history `f` (slices × sites): the
/// source-free solution radiated by `f`.
pub fn radiated_solution(lat: &SpacetimeLattice, mass: f64, source: &DMatrix<f64>) -> Result<Solution> {
    check_mass(mass)?;
    lat.check_history(source)?;
    let values = step_forward(lat, mass, source) - step_backward(lat, mass, source);
    Solution::new(*lat, mass, values)
}

/// Covariant pairing of two sources, `Σₑ a·dt f₂(e) (E f₁)(e)`. With this
/// ordering it equals `surface_form(E f₁, E f₂)`, i.e. the phase-space `Ω`
/// of the radiated solutions' slice data.
pub fn covariant_pairing(
    lat: &SpacetimeLattice,
    mass: f64,
    f1: &DMatrix<f64>,
    f2: &DMatrix<f64>,
) -> Result<f64> {
    lat.check_history(f2)?;
    let e1 = radiated_solution(lat, mass, f1)?;
    Ok(lat.spacing * lat.dt * f2.dot(e1.values()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_guards() {
        assert!(matches!(SpacetimeLattice::new(8, 8, 1.0, 1.5), Err(Error::StepGuard(_))));
        assert!(SpacetimeLattice::new(1, 8, 1.0, 0.5).is_err());
        assert!(SpacetimeLattice::new(8, 1, 1.0, 0.5).is_err());
        assert_eq!(SpacetimeLattice::new(10, 4, 1.0, 1.0).unwrap().distance(1, 9), 2);
    }

    #[test]
    fn impulse_normalization() {
        let lat = SpacetimeLattice::new(12, 10, 0.5, 0.25).unwrap();
        let src = Event::new(3, 4);
        let r = retarded_propagator(&lat, 0.7, src).unwrap();
        assert_eq!(r.value(Event::new(3, 4)), 0.0);
        assert_eq!(r.value(Event::new(2, 4)), 0.0);
        assert!((r.value(Event::new(4, 4)) - 0.5).abs() < 1e-15);
        // centered ∂ₜ(R − A) at the source slice: (dt/a + dt/a)/(2dt) = 1/a
        let pj = |t| pauli_jordan(&lat, 0.7, Event::new(t, 4), src).unwrap();
        assert!(((pj(4) - pj(2)) / (2.0 * lat.dt()) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn non_solution_rejected() {
        let lat = SpacetimeLattice::new(6, 6, 1.0, 0.5).unwrap();
        let mut v = DMatrix::zeros(6, 6);
        v[(3, 2)] = 1e-3;
        assert!(matches!(Solution::new(lat, 1.0, v), Err(Error::NotASolution { .. })));
    }

    #[test]
    fn stepping_matches_kernel_superposition() {
        let lat = SpacetimeLattice::new(9, 12, 1.0, 0.5).unwrap();
        let mut f = DMatrix::zeros(12, 9);
        f[(4, 2)] = 0.3;
        f[(6, 7)] = -1.1;
        let e = radiated_solution(&lat, 0.4, &f).unwrap();
        let mut sum = DMatrix::zeros(12, 9);
        for (t, x, w) in [(4, 2, 0.3), (6, 7, -1.1)] {
            let r = retarded_propagator(&lat, 0.4, Event::new(t, x)).unwrap();
            let a = advanced_propagator(&lat, 0.4, Event::new(t, x)).unwrap();
            sum += (r.values - a.values) * (w * lat.spacing() * lat.dt());
        }
        assert!((e.values() - sum).amax() < 1e-13);
    }
}
