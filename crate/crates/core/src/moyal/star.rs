//! Moyal product of polynomial observables and its behavior under
//! polynomial changes of phase coordinates.
//!
//! `f ⋆ g = f exp(½i P^{AB} ←∂_A →∂_B) g` with `P` the Poisson tensor. Since
//! `P` couples `φᵢ` only with `πᵢ`, the exponential factorizes over sites and
//! the series terminates after `min(deg f, deg g)` orders.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::SpatialLattice;
use crate::poly::{Polynomial, PolynomialMap};

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|j| f64::from(n - j)).product()
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn check_vars(lattice: &SpatialLattice, p: &Polynomial) -> Result<()> {
    let dim = 2 * lattice.site_count();
    if p.nvars() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: p.nvars(),
        });
    }
    Ok(())
}

/// Moyal product on the lattice phase space.
pub fn moyal_star_poly(lattice: &SpatialLattice, p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    check_vars(lattice, p)?;
    check_vars(lattice, q)?;
    let n = lattice.site_count();
    let dim = 2 * n;
    let mut out = Polynomial::zero(dim);
    for (ea, ca) in p.terms() {
        for (eb, cb) in q.terms() {
            let mut partial: Vec<(Vec<u32>, Complex64)> = vec![(vec![0; dim], ca * cb)];
            for i in 0..n {
                let (a_phi, a_pi) = (ea[i], ea[n + i]);
                let (b_phi, b_pi) = (eb[i], eb[n + i]);
                let c = Complex64::new(0.0, 0.5 / lattice.weight(i));
                let mut site: Vec<(u32, u32, Complex64)> = Vec::new();
                // ∂φᵏ on the left pairs with ∂πᵏ on the right, ∂πˡ with ∂φˡ (sign −)
                for k in 0..=a_phi.min(b_pi) {
                    for l in 0..=a_pi.min(b_phi) {
                        let weight = falling(a_phi, k) * falling(b_pi, k) * falling(a_pi, l) * falling(b_phi, l)
                            / (factorial(k) * factorial(l));
                        let coeff = c.powu(k) * (-c).powu(l) * weight;
                        site.push((a_phi + b_phi - k - l, a_pi + b_pi - k - l, coeff));
                    }
                }
                let mut next = Vec::with_capacity(partial.len() * site.len());
                for (e, v) in &partial {
                    for &(xp, xm, s) in &site {
                        let mut e = e.clone();
                        e[i] = xp;
                        e[n + i] = xm;
                        next.push((e, v * s));
                    }
                }
                partial = next;
            }
            for (e, v) in partial {
                out = &out + &Polynomial::monomial(dim, e, v);
            }
        }
    }
    Ok(out)
}

/// `(p⋆q − q⋆p) / i`.
pub fn moyal_bracket(lattice: &SpatialLattice, p: &Polynomial, q: &Polynomial) -> Result<Polynomial> {
    let pq = moyal_star_poly(lattice, p, q)?;
    let qp = moyal_star_poly(lattice, q, p)?;
    Ok((&pq - &qp).scale(Complex64::new(0.0, -1.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarCovariance {
    /// `(f∘U)⋆(g∘U) − (f⋆g)∘U`.
    pub residual: Polynomial,
    pub max_coefficient: f64,
    /// Largest coefficient of `(f⋆g)∘U`, the scale rounding errors live on.
    pub reference_scale: f64,
}

impl StarCovariance {
    /// `max_coefficient` relative to `max(1, reference_scale)`.
    pub fn relative(&self) -> f64 {
        self.max_coefficient / self.reference_scale.max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarCovarianceSummary {
    pub f_degree: u32,
    pub g_degree: u32,
    pub residual_max: f64,
}

/// Measures whether the Moyal product commutes with the pullback along a
/// polynomial phase-space map. Vanishes identically for linear symplectic
/// maps; for nonlinear maps the residual is reported as measured.
pub fn star_covariance_residual(
    lattice: &SpatialLattice,
    f: &Polynomial,
    g: &Polynomial,
    u: &PolynomialMap,
) -> Result<StarCovariance> {
    let dim = 2 * lattice.site_count();
    if u.input_dim() != dim || u.output_dim() != dim {
        return Err(Error::NonPolynomial(format!(
            "map must send the {dim}-dimensional phase space to itself"
        )));
    }
    let fu = f.compose(u)?;
    let gu = g.compose(u)?;
    let lhs = moyal_star_poly(lattice, &fu, &gu)?;
    let rhs = moyal_star_poly(lattice, f, g)?.compose(u)?;
    let residual = &lhs - &rhs;
    Ok(StarCovariance {
        max_coefficient: residual.max_abs_coeff(),
        reference_scale: rhs.max_abs_coeff(),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> SpatialLattice {
        SpatialLattice::uniform(1, 1.0).unwrap()
    }

    #[test]
    fn canonical_pair() {
        let l = unit();
        let phi = Polynomial::variable(2, 0);
        let pi = Polynomial::variable(2, 1);
        let p = moyal_star_poly(&l, &phi, &pi).unwrap();
        assert_eq!(p.coefficient(&[1, 1]), c(1.0, 0.0));
        assert_eq!(p.coefficient(&[0, 0]), c(0.0, 0.5));
        assert_eq!(p.term_count(), 2);
        let comm = &p - &moyal_star_poly(&l, &pi, &phi).unwrap();
        assert_eq!(comm, Polynomial::constant(2, c(0.0, 1.0)));
    }

    #[test]
    fn squares() {
        let l = unit();
        let phi2 = Polynomial::variable(2, 0).pow(2);
        let pi2 = Polynomial::variable(2, 1).pow(2);
        let p = moyal_star_poly(&l, &phi2, &pi2).unwrap();
        assert_eq!(p.coefficient(&[2, 2]), c(1.0, 0.0));
        assert_eq!(p.coefficient(&[1, 1]), c(0.0, 2.0));
        assert_eq!(p.coefficient(&[0, 0]), c(-0.5, 0.0));
        assert_eq!(p.term_count(), 3);
    }

    #[test]
    fn constants_scale() {
        let l = unit();
        let k = Polynomial::constant(2, c(3.0, -1.0));
        let q = &Polynomial::variable(2, 0).pow(3) + &Polynomial::variable(2, 1);
        assert_eq!(moyal_star_poly(&l, &k, &q).unwrap(), q.scale(c(3.0, -1.0)));
    }

    #[test]
    fn weights_enter_the_commutator() {
        let l = SpatialLattice::uniform(1, 0.25).unwrap();
        let b = moyal_bracket(&l, &Polynomial::variable(2, 0), &Polynomial::variable(2, 1)).unwrap();
        assert_eq!(b, Polynomial::constant(2, c(4.0, 0.0)));
    }
}
