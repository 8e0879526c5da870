//! Finite-mode realization of the Hamiltonian picture of classical and
//! quantum scalar fields.
//!
//! Everything lives on lattice or mode truncations:
//!
//! * [`lattice`]: discretized space with measure weights, patch partition,
//!   the locally-L2 Fréchet metric and the compact-support dual pairing.
//! * [`symplectic`]: phase vectors, the symplectic form, Poisson brackets and
//!   symplectomorphism diagnostics.
//! * [`linear_dynamics`]: quadratic Hamiltonians, their generators and
//!   linear evolution, with a Störmer–Verlet cross-check.
//! * [`complex_structure`]: compatible complex structures from the polar
//!   decomposition of a generator and from the positive-frequency split.
//! * [`fock`]: truncated bosonic Fock space, ladder/field/Weyl operators,
//!   second quantization and free quantum dynamics.
//! * [`implementability`]: Hilbert–Schmidt diagnostics for `[S, J]`.
//! * [`nonlinear`]: lattice φ⁴ dynamics.
//! * [`moyal`]: the Weyl algebra, the polynomial Moyal product and Gaussian
//!   states.
//! * [`covariant`]: 1+1D lattice Klein–Gordon propagators and the covariant
//!   symplectic form.

pub mod complex_structure;
pub mod covariant;
pub mod error;
pub mod fock;
pub mod implementability;
pub mod lattice;
pub mod linalg;
pub mod linear_dynamics;
pub mod moyal;
pub mod nonlinear;
pub mod poly;
pub mod symplectic;

pub use error::{Error, Result};
pub use num_complex::Complex64;
