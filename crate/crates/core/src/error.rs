use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live on different lattices")]
    LatticeMismatch,

    #[error("real and complex field functions cannot be mixed")]
    ScalarMismatch,

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("{what} = {value} is out of range {min}..={max}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    /// The Hamiltonian form H_AB must be positive definite for the
    /// complex-structure constructions.
    #[error(
        "Hamiltonian form H_AB is not positive definite (reading \"Ĥ positive definite\" as \
         positivity of H_AB): smallest eigenvalue {eigenvalue:e}"
    )]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("observable is not differentiable at the evaluation point: {0}")]
    NonDifferentiable(String),

    #[error(
        "map is not linear; a nonlinear symplectomorphism admits no *-automorphism with \
         Γ(U)W(η) = W(Uη)"
    )]
    NonlinearMap,

    #[error("step guard violated: {0}")]
    StepGuard(String),

    #[error("singular trajectory: |η| = {norm:e} exceeded the blow-up bound at t = {time}")]
    SingularTrajectory { time: f64, norm: f64 },

    #[error("input is not a solution of the lattice field equation (residual {residual:e})")]
    NotASolution { residual: f64 },

    #[error("polynomial composition failed: {0}")]
    NonPolynomial(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
