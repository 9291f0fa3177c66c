//! Multi-object tracking with a Poisson multi-Bernoulli mixture filter that
//! estimates each object's detection probability online.
//!
//! The numerical core is generic over the scalar type through [`Real`]; the
//! aliases below fix it to `f64`.

pub mod assignment;
pub mod distributions;
mod error;
pub mod metrics;
pub mod pmbm;
mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::{log_add_exp, log_sum_exp, Real};

pub type Beta = distributions::BetaParams<f64>;
pub type Gaussian = distributions::GaussianComponent<f64>;
pub type Component = distributions::BetaGaussianComponent<f64>;
pub type Track = pmbm::BernoulliTrack<f64>;
pub type Hypothesis = pmbm::GlobalHypothesis<f64>;
pub type Poisson = pmbm::PoissonIntensity<f64>;
pub type Posterior = pmbm::PmbmPosterior<f64>;
pub type Estimate = pmbm::EstimateSet<f64>;
pub type Tracker = pmbm::Filter<f64>;
pub type Costs = assignment::CostMatrix<f64>;
