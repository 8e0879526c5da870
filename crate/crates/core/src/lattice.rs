//! Discretized spatial manifold with measure weights and a patch partition.
//!
//! A [`SpatialLattice`] stands in for both the square-integrable and the
//! locally square-integrable configuration spaces: the L2 structure comes
//! from the weights, the locally-L2 (Fréchet) structure from the patches.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// JSON description of a lattice: `{"sites": N, "weights": [...], "patches": [[i,...],...]}`.
///
/// `weights` defaults to all ones. `patches` defaults to one patch per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub sites: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patches: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialLattice {
    weights: Vec<f64>,
    patches: Vec<Vec<usize>>,
    /// Patch index (0-based) of every site.
    #[serde(skip)]
    patch_of: Vec<usize>,
}

impl SpatialLattice {
    pub fn new(weights: Vec<f64>, patches: Vec<Vec<usize>>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::InvalidLattice("site count must be positive".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidLattice(format!(
                "measure weight of site {i} must be strictly positive, got {w}"
            )));
        }
        let mut patch_of = vec![usize::MAX; n];
        for (p, patch) in patches.iter().enumerate() {
            if patch.is_empty() {
                return Err(Error::InvalidLattice(format!("patch {} is empty", p + 1)));
            }
            for &site in patch {
                if site >= n {
                    return Err(Error::InvalidLattice(format!(
                        "patch {} names site {site}, lattice has {n} sites",
                        p + 1
                    )));
                }
                if patch_of[site] != usize::MAX {
                    return Err(Error::InvalidLattice(format!(
                        "site {site} appears in more than one patch"
                    )));
                }
                patch_of[site] = p;
            }
        }
        if let Some(site) = patch_of.iter().position(|&p| p == usize::MAX) {
            return Err(Error::InvalidLattice(format!("site {site} is in no patch")));
        }
        Ok(Self {
            weights,
            patches,
            patch_of,
        })
    }

    /// `sites` sites of equal weight, one patch per site.
    pub fn uniform(sites: usize, weight: f64) -> Result<Self> {
        Self::new(vec![weight; sites], (0..sites).map(|i| vec![i]).collect())
    }

    /// Equal weights with the sites cut into consecutive patches of `patch_len` sites
    /// (the last patch may be shorter).
    pub fn uniform_patched(sites: usize, weight: f64, patch_len: usize) -> Result<Self> {
        if patch_len == 0 {
            return Err(Error::InvalidLattice("patch length must be positive".into()));
        }
        let patches = (0..sites)
            .collect::<Vec<_>>()
            .chunks(patch_len)
            .map(|c| c.to_vec())
            .collect();
        Self::new(vec![weight; sites], patches)
    }

    pub fn from_spec(spec: &LatticeSpec) -> Result<Self> {
        let weights = match &spec.weights {
            Some(w) if w.len() != spec.sites => {
                return Err(Error::InvalidLattice(format!(
                    "{} weights given for {} sites",
                    w.len(),
                    spec.sites
                )))
            }
            Some(w) => w.clone(),
            None => vec![1.0; spec.sites],
        };
        let patches = spec
            .patches
            .clone()
            .unwrap_or_else(|| (0..spec.sites).map(|i| vec![i]).collect());
        Self::new(weights, patches)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: LatticeSpec = serde_json::from_str(text)?;
        Self::from_spec(&spec)
    }

    pub fn spec(&self) -> LatticeSpec {
        LatticeSpec {
            sites: self.site_count(),
            weights: Some(self.weights.clone()),
            patches: Some(self.patches.clone()),
        }
    }

    pub fn site_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, site: usize) -> f64 {
        self.weights[site]
    }

    pub fn patch_count(&self) -> usize {
        self.patches.len()
    }

    /// Sites of patch `n`, with `n` counted from 1.
    pub fn patch(&self, n: usize) -> &[usize] {
        &self.patches[n - 1]
    }

    pub fn patches(&self) -> &[Vec<usize>] {
        &self.patches
    }

    /// 1-based patch index of `site`.
    pub fn patch_of(&self, site: usize) -> usize {
        self.patch_of[site] + 1
    }

    /// `Σ_{n=k+1}^{K} 2^{-n}`: the largest metric distance two functions that
    /// agree on patches `1..=k` can have.
    pub fn tail_bound(&self, k: usize) -> f64 {
        ((k + 1)..=self.patch_count())
            .map(|n| 0.5_f64.powi(n as i32))
            .sum()
    }
}

/// Per-site values. The scalar kind is fixed at construction.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl FieldValues {
    pub fn len(&self) -> usize {
        match self {
            FieldValues::Real(v) => v.len(),
            FieldValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, i: usize) -> Complex64 {
        match self {
            FieldValues::Real(v) => Complex64::new(v[i], 0.0),
            FieldValues::Complex(v) => v[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldFunction {
    lattice: Arc<SpatialLattice>,
    values: FieldValues,
}

impl FieldFunction {
    pub fn real(lattice: Arc<SpatialLattice>, values: Vec<f64>) -> Result<Self> {
        Self::new(lattice, FieldValues::Real(values))
    }

    pub fn complex(lattice: Arc<SpatialLattice>, values: Vec<Complex64>) -> Result<Self> {
        Self::new(lattice, FieldValues::Complex(values))
    }

    pub fn new(lattice: Arc<SpatialLattice>, values: FieldValues) -> Result<Self> {
        if values.len() != lattice.site_count() {
            return Err(Error::DimensionMismatch {
                expected: lattice.site_count(),
                found: values.len(),
            });
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: Arc<SpatialLattice>) -> Self {
        let n = lattice.site_count();
        Self {
            lattice,
            values: FieldValues::Real(vec![0.0; n]),
        }
    }

    /// Real indicator of a single site.
    pub fn indicator(lattice: Arc<SpatialLattice>, site: usize) -> Self {
        let mut v = vec![0.0; lattice.site_count()];
        v[site] = 1.0;
        Self {
            lattice,
            values: FieldValues::Real(v),
        }
    }

    pub fn lattice(&self) -> &Arc<SpatialLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &FieldValues {
        &self.values
    }

    pub fn is_real(&self) -> bool {
        matches!(self.values, FieldValues::Real(_))
    }

    /// Real values, or `ScalarMismatch` for a complex function.
    pub fn real_values(&self) -> Result<&[f64]> {
        match &self.values {
            FieldValues::Real(v) => Ok(v),
            FieldValues::Complex(_) => Err(Error::ScalarMismatch),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_compatible(&self, other: &FieldFunction) -> Result<()> {
        same_lattice(&self.lattice, &other.lattice)?;
        if self.is_real() != other.is_real() {
            return Err(Error::ScalarMismatch);
        }
        Ok(())
    }

    /// Pointwise difference; both operands must share lattice and scalar kind.
    pub fn sub(&self, other: &FieldFunction) -> Result<FieldFunction> {
        self.check_compatible(other)?;
        let values = match (&self.values, &other.values) {
            (FieldValues::Real(a), FieldValues::Real(b)) => {
                FieldValues::Real(a.iter().zip(b).map(|(x, y)| x - y).collect())
            }
            (FieldValues::Complex(a), FieldValues::Complex(b)) => {
                FieldValues::Complex(a.iter().zip(b).map(|(x, y)| x - y).collect())
            }
            _ => unreachable!("scalar kinds checked above"),
        };
        Ok(FieldFunction {
            lattice: self.lattice.clone(),
            values,
        })
    }

    /// Weighted L2 norm restricted to patch `n` (1-based).
    pub fn patch_norm(&self, n: usize) -> f64 {
        self.lattice
            .patch(n)
            .iter()
            .map(|&i| self.lattice.weight(i) * self.values.get(i).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        (0..self.len())
            .map(|i| self.lattice.weight(i) * self.values.get(i).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn same_lattice(a: &Arc<SpatialLattice>, b: &Arc<SpatialLattice>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::LatticeMismatch)
    }
}

/// Field function vanishing outside a finite set of patches.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactlySupportedFunction {
    base: FieldFunction,
    support_patches: BTreeSet<usize>,
}

impl CompactlySupportedFunction {
    /// Checks that `base` vanishes outside `support_patches` (1-based indices).
    pub fn new(base: FieldFunction, support_patches: BTreeSet<usize>) -> Result<Self> {
        let lattice = base.lattice().clone();
        let k = lattice.patch_count();
        if let Some(&p) = support_patches.iter().find(|&&p| p == 0 || p > k) {
            return Err(Error::OutOfRange {
                what: "support patch",
                value: p,
                min: 1,
                max: k,
            });
        }
        for site in 0..lattice.site_count() {
            if !support_patches.contains(&lattice.patch_of(site)) && base.values.get(site).norm() != 0.0
            {
                return Err(Error::Validation(format!(
                    "value at site {site} is nonzero outside the declared support"
                )));
            }
        }
        Ok(Self {
            base,
            support_patches,
        })
    }

    /// Support read off from the nonzero values.
    pub fn from_function(base: FieldFunction) -> Self {
        let lattice = base.lattice().clone();
        let support_patches = (0..lattice.site_count())
            .filter(|&i| base.values.get(i).norm() != 0.0)
            .map(|i| lattice.patch_of(i))
            .collect();
        Self {
            base,
            support_patches,
        }
    }

    pub fn base(&self) -> &FieldFunction {
        &self.base
    }

    pub fn support_patches(&self) -> &BTreeSet<usize> {
        &self.support_patches
    }
}

/// `Σᵢ μᵢ conj(fᵢ) gᵢ`.
pub fn l2_inner(f: &FieldFunction, g: &FieldFunction) -> Result<Complex64> {
    f.check_compatible(g)?;
    let lattice = &f.lattice;
    Ok((0..f.len())
        .map(|i| f.values.get(i).conj() * g.values.get(i) * lattice.weight(i))
        .sum())
}

/// `d(f,g) = Σₙ 2⁻ⁿ ‖f−g‖ₙ / (1 + ‖f−g‖ₙ)`, patches counted from 1.
pub fn frechet_metric(f: &FieldFunction, g: &FieldFunction) -> Result<f64> {
    let diff = f.sub(g)?;
    Ok((1..=f.lattice.patch_count())
        .map(|n| {
            let norm = diff.patch_norm(n);
            0.5_f64.powi(n as i32) * norm / (1.0 + norm)
        })
        .sum())
}

/// `ψ(φ) = Σᵢ μᵢ ψᵢ φᵢ` for real functions.
pub fn dual_pair(psi: &CompactlySupportedFunction, phi: &FieldFunction) -> Result<f64> {
    same_lattice(psi.base.lattice(), phi.lattice())?;
    let a = psi.base.real_values()?;
    let b = phi.real_values()?;
    let lattice = phi.lattice();
    // only sites in the support contribute
    Ok(psi
        .support_patches
        .iter()
        .flat_map(|&p| lattice.patch(p).iter())
        .map(|&i| lattice.weight(i) * a[i] * b[i])
        .sum())
}

/// Restriction of `f` to patches `1..=k`.
pub fn truncate_to_patches(f: &FieldFunction, k: usize) -> Result<CompactlySupportedFunction> {
    let lattice = f.lattice().clone();
    let count = lattice.patch_count();
    if k == 0 || k > count {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            min: 1,
            max: count,
        });
    }
    let keep = |i: usize| lattice.patch_of(i) <= k;
    let values = match &f.values {
        FieldValues::Real(v) => FieldValues::Real(
            v.iter()
                .enumerate()
                .map(|(i, x)| if keep(i) { *x } else { 0.0 })
                .collect(),
        ),
        FieldValues::Complex(v) => FieldValues::Complex(
            v.iter()
                .enumerate()
                .map(|(i, x)| if keep(i) { *x } else { Complex64::new(0.0, 0.0) })
                .collect(),
        ),
    };
    Ok(CompactlySupportedFunction {
        base: FieldFunction {
            lattice: lattice.clone(),
            values,
        },
        support_patches: (1..=k).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(weights: Vec<f64>, patches: Vec<Vec<usize>>) -> Arc<SpatialLattice> {
        Arc::new(SpatialLattice::new(weights, patches).unwrap())
    }

    #[test]
    fn rejects_nonpositive_weight() {
        let err = SpatialLattice::new(vec![1.0, 0.0], vec![vec![0, 1]]).unwrap_err();
        assert!(matches!(err, Error::InvalidLattice(_)));
    }

    #[test]
    fn rejects_overlapping_or_incomplete_patches() {
        assert!(SpatialLattice::new(vec![1.0; 3], vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(SpatialLattice::new(vec![1.0; 3], vec![vec![0, 1]]).is_err());
        assert!(SpatialLattice::new(vec![1.0; 3], vec![vec![0, 1], vec![2, 3]]).is_err());
    }

    #[test]
    fn json_weights_default_to_one() {
        let l = SpatialLattice::from_json(r#"{"sites": 3, "patches": [[0,1],[2]]}"#).unwrap();
        assert_eq!(l.weights(), &[1.0, 1.0, 1.0]);
        assert_eq!(l.patch_count(), 2);
        assert_eq!(l.patch_of(2), 2);
        assert!(SpatialLattice::from_json(r#"{"sites": 3, "weights": [1.0]}"#).is_err());
    }

    #[test]
    fn inner_product_single_site_half_weight() {
        let l = lat(vec![0.5, 1.0], vec![vec![0], vec![1]]);
        let f = FieldFunction::indicator(l.clone(), 0);
        assert_eq!(l2_inner(&f, &f).unwrap(), Complex64::new(0.5, 0.0));
        let z = FieldFunction::zeros(l);
        assert_eq!(l2_inner(&z, &f).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn inner_product_errors() {
        let a = lat(vec![1.0], vec![vec![0]]);
        let b = lat(vec![2.0], vec![vec![0]]);
        let f = FieldFunction::indicator(a.clone(), 0);
        let g = FieldFunction::indicator(b, 0);
        assert!(matches!(l2_inner(&f, &g), Err(Error::LatticeMismatch)));
        let c = FieldFunction::complex(a, vec![Complex64::new(0.0, 1.0)]).unwrap();
        assert!(matches!(l2_inner(&f, &c), Err(Error::ScalarMismatch)));
    }

    #[test]
    fn complex_inner_product_is_conjugate_linear_in_first_slot() {
        let l = lat(vec![2.0], vec![vec![0]]);
        let f = FieldFunction::complex(l.clone(), vec![Complex64::new(0.0, 1.0)]).unwrap();
        let g = FieldFunction::complex(l, vec![Complex64::new(1.0, 0.0)]).unwrap();
        assert_eq!(l2_inner(&f, &g).unwrap(), Complex64::new(0.0, -2.0));
    }

    #[test]
    fn metric_single_patch_value() {
        let l = lat(vec![1.0, 1.0, 1.0], vec![vec![0], vec![1, 2]]);
        let f = FieldFunction::indicator(l.clone(), 0);
        let g = FieldFunction::zeros(l);
        assert_eq!(frechet_metric(&f, &g).unwrap(), 0.25);
        assert_eq!(frechet_metric(&f, &f).unwrap(), 0.0);
    }

    #[test]
    fn metric_is_below_geometric_sum() {
        let l = lat(vec![1.0; 4], (0..4).map(|i| vec![i]).collect());
        let f = FieldFunction::real(l.clone(), vec![1e9; 4]).unwrap();
        let d = frechet_metric(&f, &FieldFunction::zeros(l)).unwrap();
        assert!(d < 1.0 && d > 0.9);
    }

    #[test]
    fn dual_pair_single_site() {
        let l = lat(vec![1.0, 1.0], vec![vec![0], vec![1]]);
        let psi = FieldFunction::real(l.clone(), vec![3.0, 0.0]).unwrap();
        let psi = CompactlySupportedFunction::new(psi, [1].into()).unwrap();
        let phi = FieldFunction::real(l.clone(), vec![-2.0, 7.0]).unwrap();
        assert_eq!(dual_pair(&psi, &phi).unwrap(), -6.0);
        let zero = CompactlySupportedFunction::from_function(FieldFunction::zeros(l));
        assert_eq!(dual_pair(&zero, &phi).unwrap(), 0.0);
    }

    #[test]
    fn support_is_enforced() {
        let l = lat(vec![1.0, 1.0], vec![vec![0], vec![1]]);
        let f = FieldFunction::real(l, vec![1.0, 1.0]).unwrap();
        assert!(CompactlySupportedFunction::new(f.clone(), [1].into()).is_err());
        assert!(CompactlySupportedFunction::new(f, [3].into()).is_err());
    }

    #[test]
    fn truncation_edges() {
        let l = lat(vec![1.0; 3], vec![vec![0], vec![1], vec![2]]);
        let f = FieldFunction::real(l.clone(), vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(truncate_to_patches(&f, 3).unwrap().base(), &f);
        assert!(matches!(
            truncate_to_patches(&f, 0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(truncate_to_patches(&f, 4).is_err());
        let z = FieldFunction::zeros(l);
        assert_eq!(truncate_to_patches(&z, 1).unwrap().base(), &z);
        let t = truncate_to_patches(&f, 1).unwrap();
        assert_eq!(t.base().real_values().unwrap(), &[1.0, 0.0, 0.0]);
    }
}
