//! Weyl algebra, Moyal products and Gaussian states.

pub mod gaussian;
pub mod star;
pub mod weyl;

pub use gaussian::{gaussian_expect, gram_matrix, n_point, GaussianState, NPoint};
pub use star::{
    moyal_bracket, moyal_star_poly, star_covariance_residual, StarCovariance, StarCovarianceSummary,
};
pub use weyl::{
    linear_automorphism, omega_map_matrix, sup_norm_bounds, weyl_involution, weyl_star, NormBounds,
    WeylElement,
};
