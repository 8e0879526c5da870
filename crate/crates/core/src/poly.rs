//! Sparse multivariate polynomials with complex coefficients over phase
//! coordinates, and polynomial maps between phase spaces.
//!
//! On a lattice with `n` sites, variables `0..n` are the field values φ and
//! `n..2n` the momenta π.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Exponents, Complex64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn variable(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self::monomial(nvars, e, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(nvars: usize, exponents: Exponents, coeff: Complex64) -> Self {
        assert_eq!(exponents.len(), nvars, "exponent length must match variable count");
        let mut p = Self::zero(nvars);
        p.add_term(exponents, coeff);
        p
    }

    /// `Σ cᵢ xᵢ`.
    pub fn linear(coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, Complex64::new(c, 0.0));
        }
        p
    }

    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Exponents, Complex64)>,
    ) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length must match variable count");
            p.add_term(e, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, exponents: Exponents, coeff: Complex64) {
        if coeff == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(exponents) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == Complex64::new(0.0, 0.0) {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Complex64)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Complex64 {
        self.terms
            .get(exponents)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total exponent; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0_f64, |acc, c| acc.max(c.norm()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c * s)))
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut d = e.clone();
                d[var] -= 1;
                out.add_term(d, c * e[var] as f64);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, Complex64::new(1.0, 0.0));
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.nvars, "point dimension must match variable count");
        self.terms
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&k, &xi)| xi.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<Complex64> {
        (0..self.nvars).map(|v| self.derivative(v).eval(x)).collect()
    }

    /// `p ∘ map`: substitute the map's components for the variables.
    pub fn compose(&self, map: &PolynomialMap) -> Result<Self> {
        if map.input_dim() == 0 || map.output_dim() != self.nvars {
            return Err(Error::NonPolynomial(format!(
                "map produces {} coordinates, polynomial expects {}",
                map.output_dim(),
                self.nvars
            )));
        }
        let nv = map.input_dim();
        let mut out = Self::zero(nv);
        // cache powers of each component
        let mut powers: Vec<Vec<Polynomial>> = map
            .components
            .iter()
            .map(|c| vec![Polynomial::constant(nv, Complex64::new(1.0, 0.0)), c.clone()])
            .collect();
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(nv, *c);
            for (var, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[var].len() <= k as usize {
                    let next = &powers[var][powers[var].len() - 1] * &map.components[var];
                    powers[var].push(next);
                }
                term = &term * &powers[var][k as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

/// A map `R^m → R^k` whose components are polynomials with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialMap {
    components: Vec<Polynomial>,
}

impl PolynomialMap {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let nvars = components.first().map(Polynomial::nvars).unwrap_or(0);
        if components.iter().any(|c| c.nvars() != nvars) {
            return Err(Error::Validation(
                "map components must share one variable count".into(),
            ));
        }
        if components.iter().any(|c| !c.is_real()) {
            return Err(Error::Validation(
                "phase-space maps must have real coefficients".into(),
            ));
        }
        Ok(Self { components })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            components: (0..dim).map(|i| Polynomial::variable(dim, i)).collect(),
        }
    }

    /// `x ↦ M x`.
    pub fn linear(matrix: &DMatrix<f64>) -> Self {
        Self {
            components: (0..matrix.nrows())
                .map(|r| Polynomial::linear(matrix.row(r).iter().copied().collect::<Vec<_>>().as_slice()))
                .collect(),
        }
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn input_dim(&self) -> usize {
        self.components.first().map(Polynomial::nvars).unwrap_or(0)
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(Polynomial::degree).max().unwrap_or(0)
    }

    /// Homogeneous of degree one (no constant term, no higher powers).
    pub fn is_linear(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.terms().all(|(e, _)| e.iter().sum::<u32>() == 1))
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.components.len(),
            self.components.iter().map(|c| c.eval(x.as_slice()).re),
        )
    }

    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let rows = self.components.len();
        let cols = self.input_dim();
        let mut j = DMatrix::zeros(rows, cols);
        for (r, c) in self.components.iter().enumerate() {
            for (col, g) in c.gradient(x.as_slice()).into_iter().enumerate() {
                j[(r, col)] = g.re;
            }
        }
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn arithmetic_and_degree() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let p = &(&x * &x) + &(&x * &y);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(&[2.0, 3.0]), c(10.0));
        assert!((&p - &p).is_zero());
        assert_eq!(p.derivative(0).eval(&[2.0, 3.0]), c(7.0));
    }

    #[test]
    fn compose_with_shear() {
        // (x, y) -> (x, y + e x^3); y^2 ∘ U = y^2 + 2 e x^3 y + e^2 x^6
        let e = 0.5;
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        let shear = PolynomialMap::new(vec![x.clone(), &y + &x.pow(3).scale(c(e))]).unwrap();
        let q = y.pow(2).compose(&shear).unwrap();
        assert_eq!(q.coefficient(&[0, 2]), c(1.0));
        assert_eq!(q.coefficient(&[3, 1]), c(2.0 * e));
        assert_eq!(q.coefficient(&[6, 0]), c(e * e));
        assert_eq!(q.term_count(), 3);
    }

    #[test]
    fn linear_map_round_trip() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let map = PolynomialMap::linear(&m);
        assert!(map.is_linear());
        let x = DVector::from_vec(vec![0.5, -1.0]);
        assert_eq!(map.apply(&x), &m * &x);
        assert_eq!(map.jacobian(&x), m);
    }

    #[test]
    fn rejects_complex_map() {
        let p = Polynomial::constant(1, Complex64::new(0.0, 1.0));
        assert!(PolynomialMap::new(vec![p]).is_err());
    }
}
