//! Closed-form algebra of Beta and Gaussian densities.

mod beta;
mod gaussian;
mod mixture;

pub use beta::{ln_beta, BetaParams};
pub use gaussian::{is_symmetric_psd, robust_cholesky, symmetrize, GaussianComponent, Innovation};
pub use mixture::{hellinger_distance, moment_match, BetaGaussianComponent, MomentMatch};
pub(crate) use mixture::hellinger_lower_bound;
