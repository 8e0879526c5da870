//! Bosonic Fock space truncated by total particle number.
//!
//! States live in occupation-number coordinates: a basis vector is a
//! multi-index `(n₁, …, n_d)` with `Σnᵢ ≤ N_max`, ordered by total particle
//! number and, within one sector, descending lexicographically (so the
//! one-particle block follows mode order). Symmetrized tensor products
//! reduce to the `√(n+1)` ladder rule.
//!
//! Mode vectors carry the inner product `⟨η, ψ⟩ = Σ conj(ηₖ) ψₖ`; the
//! one-particle symplectic form is taken as `Im⟨η, ψ⟩`, under which
//! `W(η)W(ψ) = exp(−½iΩ(η, ψ)) W(η + ψ)`.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::SpatialLattice;
use crate::linalg::{
    exp_action, hermitian_exp, hermiticity_residual, max_abs_c, operator_norm, unitarity_residual, CMatrix,
    CVector,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct FockSpace {
    modes: usize,
    cutoff: usize,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    lowering: Vec<CMatrix>,
}

fn push_compositions(modes: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == modes {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        push_compositions(modes, total - first, prefix, out);
        prefix.pop();
    }
}

impl FockSpace {
    pub fn new(modes: usize, cutoff: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::Validation("Fock space needs at least one mode".into()));
        }
        let mut basis = Vec::new();
        for total in 0..=cutoff as u32 {
            push_compositions(modes, total, &mut Vec::with_capacity(modes), &mut basis);
        }
        let index: HashMap<Vec<u32>, usize> =
            basis.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let dim = basis.len();
        let lowering = (0..modes)
            .map(|k| {
                let mut a = CMatrix::zeros(dim, dim);
                for (col, occ) in basis.iter().enumerate() {
                    if occ[k] > 0 {
                        let mut target = occ.clone();
                        target[k] -= 1;
                        a[(index[&target], col)] = Complex64::new(f64::from(occ[k]).sqrt(), 0.0);
                    }
                }
                a
            })
            .collect();
        Ok(Self {
            modes,
            cutoff,
            basis,
            index,
            lowering,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn index_of(&self, occupation: &[u32]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    pub fn particle_number(&self, i: usize) -> usize {
        self.basis[i].iter().sum::<u32>() as usize
    }

    /// Indices of basis states with at most `max_particles` quanta.
    pub fn sector_indices(&self, max_particles: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.particle_number(i) <= max_particles)
            .collect()
    }

    /// Single-mode lowering operator `a_k`.
    pub fn lowering(&self, k: usize) -> &CMatrix {
        &self.lowering[k]
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim())
    }

    pub fn vacuum(&self) -> FockState {
        let mut c = CVector::zeros(self.dim());
        c[0] = ONE;
        FockState { coefficients: c }
    }

    pub fn basis_state(&self, occupation: &[u32]) -> Result<FockState> {
        let i = self.index_of(occupation).ok_or_else(|| {
            Error::Validation(format!("occupation {occupation:?} is not in the truncated basis"))
        })?;
        let mut c = CVector::zeros(self.dim());
        c[i] = ONE;
        Ok(FockState { coefficients: c })
    }

    fn check_mode(&self, eta: &ModeVector) -> Result<()> {
        if eta.len() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: eta.len(),
            });
        }
        Ok(())
    }

    fn check_state(&self, psi: &FockState) -> Result<()> {
        if psi.coefficients.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.coefficients.len(),
            });
        }
        Ok(())
    }

    fn check_one_particle(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.modes || m.ncols() != self.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: m.nrows().max(m.ncols()),
            });
        }
        Ok(())
    }

    /// Spectral norm of `op` restricted to states with at most
    /// `max_particles` quanta.
    pub fn restricted_norm(&self, op: &CMatrix, max_particles: usize) -> f64 {
        let cols = self.sector_indices(max_particles);
        operator_norm(&op.select_columns(cols.iter()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    coefficients: CVector,
}

impl FockState {
    pub fn new(space: &FockSpace, coefficients: CVector) -> Result<Self> {
        let s = Self { coefficients };
        space.check_state(&s)?;
        Ok(s)
    }

    pub fn coefficients(&self) -> &CVector {
        &self.coefficients
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.norm()
    }

    /// Physical states have unit norm to `1e-10`.
    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-10
    }

    pub fn normalized(&self) -> Self {
        Self {
            coefficients: &self.coefficients / Complex64::new(self.norm(), 0.0),
        }
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.coefficients.dotc(&other.coefficients)
    }

    pub fn apply(&self, op: &CMatrix) -> FockState {
        FockState {
            coefficients: op * &self.coefficients,
        }
    }

    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        self.coefficients.dotc(&(op * &self.coefficients))
    }

    pub fn distance(&self, other: &FockState) -> f64 {
        (&self.coefficients - &other.coefficients).norm()
    }
}

/// One-particle vector in the complex mode space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    components: CVector,
}

impl ModeVector {
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("mode vector has non-finite components".into()));
        }
        Ok(Self {
            components: CVector::from_vec(components),
        })
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            components: CVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0))),
        }
    }

    pub fn unit(modes: usize, k: usize) -> Self {
        let mut c = CVector::zeros(modes);
        c[k] = ONE;
        Self { components: c }
    }

    pub fn components(&self) -> &CVector {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.components.norm()
    }

    /// `⟨self, other⟩ = Σ conj(selfₖ) otherₖ`.
    pub fn inner(&self, other: &ModeVector) -> Complex64 {
        self.components.dotc(&other.components)
    }

    pub fn scale(&self, c: Complex64) -> ModeVector {
        ModeVector {
            components: &self.components * c,
        }
    }

    pub fn add(&self, other: &ModeVector) -> ModeVector {
        ModeVector {
            components: &self.components + &other.components,
        }
    }

    /// `U η` for a one-particle operator `U`.
    pub fn transform(&self, u: &CMatrix) -> ModeVector {
        ModeVector {
            components: u * &self.components,
        }
    }
}

/// One-particle symplectic form `Im⟨η, ψ⟩`.
pub fn mode_omega(eta: &ModeVector, psi: &ModeVector) -> f64 {
    eta.inner(psi).im
}

/// `a_η = Σ conj(ηₖ) aₖ` (antilinear in η).
pub fn annihilation_operator(space: &FockSpace, eta: &ModeVector) -> Result<CMatrix> {
    space.check_mode(eta)?;
    let mut out = CMatrix::zeros(space.dim(), space.dim());
    for (k, c) in eta.components.iter().enumerate() {
        if *c != ZERO {
            out += space.lowering(k) * c.conj();
        }
    }
    Ok(out)
}

/// `a†_η`; the top sector `Σn = N_max` is mapped to zero.
pub fn creation_operator(space: &FockSpace, eta: &ModeVector) -> Result<CMatrix> {
    Ok(annihilation_operator(space, eta)?.adjoint())
}

pub fn annihilate(space: &FockSpace, eta: &ModeVector, psi: &FockState) -> Result<FockState> {
    space.check_state(psi)?;
    Ok(psi.apply(&annihilation_operator(space, eta)?))
}

pub fn create(space: &FockSpace, eta: &ModeVector, psi: &FockState) -> Result<FockState> {
    space.check_state(psi)?;
    Ok(psi.apply(&creation_operator(space, eta)?))
}

/// `φ̂(η) = (a_η + a†_η)/√2`.
pub fn field_operator(space: &FockSpace, eta: &ModeVector) -> Result<CMatrix> {
    let a = annihilation_operator(space, eta)?;
    Ok((&a + a.adjoint()) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
}

/// `a†_η a_η`.
pub fn number_operator(space: &FockSpace, eta: &ModeVector) -> Result<CMatrix> {
    let a = annihilation_operator(space, eta)?;
    Ok(a.adjoint() * a)
}

/// `N̂`, diagonal with eigenvalue `Σnᵢ`.
pub fn total_number(space: &FockSpace) -> CMatrix {
    let diag = CVector::from_iterator(
        space.dim(),
        (0..space.dim()).map(|i| Complex64::new(space.particle_number(i) as f64, 0.0)),
    );
    CMatrix::from_diagonal(&diag)
}

fn check_self_adjoint(t: &CMatrix) -> Result<()> {
    let r = hermiticity_residual(t);
    if r > 1e-12 * max_abs_c(t).max(1.0) {
        return Err(Error::Validation(format!(
            "one-particle operator is not self-adjoint (residual {r:e})"
        )));
    }
    Ok(())
}

fn quadratic_lift(space: &FockSpace, t: &CMatrix) -> CMatrix {
    // a†_μ a_ν |n⟩ = √(n_ν (n_μ + 1 − δ_μν)) |n − e_ν + e_μ⟩; exact integers on the diagonal
    let mut out = CMatrix::zeros(space.dim(), space.dim());
    for (col, occ) in space.basis().iter().enumerate() {
        for nu in 0..space.modes() {
            if occ[nu] == 0 {
                continue;
            }
            let mut lowered = occ.clone();
            lowered[nu] -= 1;
            for mu in 0..space.modes() {
                let c = t[(mu, nu)];
                if c == ZERO {
                    continue;
                }
                let mut target = lowered.clone();
                target[mu] += 1;
                let amp = if mu == nu {
                    f64::from(occ[nu])
                } else {
                    (f64::from(occ[nu]) * f64::from(target[mu])).sqrt()
                };
                out[(space.index[&target], col)] += c * amp;
            }
        }
    }
    out
}

/// `T̂ = Σ a†_μ T^μ_ν a^ν` for self-adjoint `T`.
pub fn total_t_operator(space: &FockSpace, t: &CMatrix) -> Result<CMatrix> {
    space.check_one_particle(t)?;
    check_self_adjoint(t)?;
    Ok(quadratic_lift(space, t))
}

/// Generator `dΓ(A)` of `Γ(exp(itA))`; coincides with the total `A` operator.
pub fn d_gamma(space: &FockSpace, a: &CMatrix) -> Result<CMatrix> {
    total_t_operator(space, a)
}

/// Quantum Hamiltonian `Σ a†_μ H^μ_ν a^ν`.
pub fn fock_hamiltonian(space: &FockSpace, h: &CMatrix) -> Result<CMatrix> {
    total_t_operator(space, h)
}

/// `n̂(x) = a†ₓaₓ / μₓ` with one mode per lattice site.
pub fn density_operator(space: &FockSpace, lattice: &SpatialLattice, site: usize) -> Result<CMatrix> {
    if lattice.site_count() != space.modes() {
        return Err(Error::Validation(format!(
            "mode basis not aligned with lattice: {} modes, {} sites",
            space.modes(),
            lattice.site_count()
        )));
    }
    if site >= space.modes() {
        return Err(Error::OutOfRange {
            what: "site",
            value: site,
            min: 0,
            max: space.modes() - 1,
        });
    }
    let a = space.lowering(site);
    Ok(a.adjoint() * a / Complex64::new(lattice.weight(site), 0.0))
}

/// `W(η) = exp(iφ̂(η))` on the truncated space. The truncated field operator
/// is Hermitian, so the result is exactly unitary; deviation from the Weyl
/// relations is confined near the cutoff.
pub fn weyl_operator(space: &FockSpace, eta: &ModeVector) -> Result<CMatrix> {
    Ok(hermitian_exp(&field_operator(space, eta)?, I))
}

/// `Γ(U)`: `U` applied to every particle slot.
pub fn second_quantize(space: &FockSpace, u: &CMatrix) -> Result<CMatrix> {
    space.check_one_particle(u)?;
    let r = unitarity_residual(u);
    if r > 1e-10 {
        return Err(Error::Validation(format!(
            "one-particle operator is not unitary (residual {r:e})"
        )));
    }
    let raising: Vec<CMatrix> = (0..space.modes())
        .map(|k| quadratic_column_raising(space, u, k))
        .collect();
    let dim = space.dim();
    let mut gamma = CMatrix::zeros(dim, dim);
    gamma[(0, 0)] = Complex64::new(1.0, 0.0);
    // graded order: removing one particle from the last occupied mode lands on an earlier column
    for (col, occ) in space.basis().iter().enumerate().skip(1) {
        let k = occ.iter().rposition(|&n| n > 0).expect("only the vacuum is empty");
        let mut lower = occ.clone();
        lower[k] -= 1;
        let prev = space.index_of(&lower).expect("lower sector is in the basis");
        let v = &raising[k] * gamma.column(prev) / Complex64::new(f64::from(occ[k]).sqrt(), 0.0);
        gamma.set_column(col, &v);
    }
    Ok(gamma)
}

/// `a†_{U e_k}`.
fn quadratic_column_raising(space: &FockSpace, u: &CMatrix, k: usize) -> CMatrix {
    let mut out = CMatrix::zeros(space.dim(), space.dim());
    for j in 0..space.modes() {
        let c = u[(j, k)];
        if c != ZERO {
            out += space.lowering(j).adjoint() * c;
        }
    }
    out
}

/// `exp(−i Ĥ_F t) Ψ`.
pub fn evolve_quantum(h_fock: &CMatrix, psi: &FockState, t: f64) -> Result<FockState> {
    if h_fock.nrows() != psi.coefficients.len() || h_fock.ncols() != psi.coefficients.len() {
        return Err(Error::DimensionMismatch {
            expected: h_fock.nrows(),
            found: psi.coefficients.len(),
        });
    }
    check_self_adjoint(h_fock)?;
    Ok(psi.apply(&hermitian_exp(h_fock, Complex64::new(0.0, -t))))
}

/// Residuals of the commutation relations on the sectors where truncation
/// does not interfere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcrResiduals {
    /// `[a_η, a_ψ]`.
    pub annihilators: f64,
    /// `[a†_η, a†_ψ]` below `N_max − 1`.
    pub creators: f64,
    /// `[a_η, a†_ψ] − ⟨η, ψ⟩` below `N_max`.
    pub mixed: f64,
}

impl CcrResiduals {
    pub fn max(&self) -> f64 {
        self.annihilators.max(self.creators).max(self.mixed)
    }
}

pub fn ccr_residuals(space: &FockSpace, eta: &ModeVector, psi: &ModeVector) -> Result<CcrResiduals> {
    let a_eta = annihilation_operator(space, eta)?;
    let a_psi = annihilation_operator(space, psi)?;
    let c_eta = a_eta.adjoint();
    let c_psi = a_psi.adjoint();
    let top = space.cutoff();
    let aa = &a_eta * &a_psi - &a_psi * &a_eta;
    let cc = &c_eta * &c_psi - &c_psi * &c_eta;
    let mixed = &a_eta * &c_psi - &c_psi * &a_eta - space.identity() * eta.inner(psi);
    Ok(CcrResiduals {
        annihilators: operator_norm(&aa),
        creators: if top >= 2 {
            space.restricted_norm(&cc, top - 2)
        } else {
            0.0
        },
        mixed: if top >= 1 {
            space.restricted_norm(&mixed, top - 1)
        } else {
            0.0
        },
    })
}

/// `‖(W(η)W(η′) − e^{−½iΩ(η,η′)} W(η+η′)) P_{≤k}‖`.
pub fn weyl_relation_residual(
    space: &FockSpace,
    eta: &ModeVector,
    eta2: &ModeVector,
    max_particles: usize,
) -> Result<f64> {
    let w1 = weyl_operator(space, eta)?;
    let w2 = weyl_operator(space, eta2)?;
    let w12 = weyl_operator(space, &eta.add(eta2))?;
    let phase = Complex64::new(0.0, -0.5 * mode_omega(eta, eta2)).exp();
    Ok(space.restricted_norm(&(w1 * w2 - w12 * phase), max_particles))
}

/// `⟨v, W(η) v⟩`.
pub fn vacuum_characteristic(space: &FockSpace, eta: &ModeVector) -> Result<Complex64> {
    let v = space.vacuum();
    let moved = exp_action(&field_operator(space, eta)?, I, v.coefficients());
    Ok(moved[0])
}

/// `‖(Γ(U) W(η) Γ(U)⁻¹ − W(Uη)) P_{≤k}‖`.
pub fn covariance_residual(
    space: &FockSpace,
    u: &CMatrix,
    eta: &ModeVector,
    max_particles: usize,
) -> Result<f64> {
    let gamma = second_quantize(space, u)?;
    let w = weyl_operator(space, eta)?;
    let moved = weyl_operator(space, &eta.transform(u))?;
    let conj = &gamma * w * gamma.adjoint();
    Ok(space.restricted_norm(&(conj - moved), max_particles))
}

/// Sanity wrapper used by callers holding a lattice handle.
pub fn site_mode_space(lattice: &Arc<SpatialLattice>, cutoff: usize) -> Result<FockSpace> {
    FockSpace::new(lattice.site_count(), cutoff)
}
