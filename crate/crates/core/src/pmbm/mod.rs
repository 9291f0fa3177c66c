//! Poisson multi-Bernoulli mixture posterior over object states augmented
//! with their detection probability, and its recursion.
//!
//! Undetected objects are a Poisson process with a Beta-Gaussian mixture
//! intensity. Potentially detected objects form a mixture of multi-Bernoulli
//! global hypotheses, each track carrying one Beta-Gaussian density. The
//! Beta marginal is the belief over that object's detection probability.

mod estimate;
mod filter;
mod model;
mod predict;
mod reduce;
pub mod snapshot;
mod types;
mod update;

pub use estimate::estimate;
pub use filter::{run_fixed_pd, Filter};
pub use model::{DetectionModel, FilterConfig, HypothesisBudget, MotionModel, ReductionConfig, SensorModel};
pub use predict::{predict, predict_track};
pub use reduce::{reduce, reduce_hypotheses, reduce_poisson};
pub use types::{
    BernoulliTrack, EstimateSet, GlobalHypothesis, PmbmPosterior, PoissonIntensity, TrackId, UpdateKind,
};
pub use update::{
    build_cost_matrix, detect_track, first_detection, misdetect_track, normalize, update, update_undetected,
    FirstDetection,
};
