use nalgebra::DVector;

use super::estimate::estimate;
use super::model::{DetectionModel, HypothesisBudget, MotionModel, ReductionConfig, SensorModel};
use super::predict::predict;
use super::reduce::reduce;
use super::types::{EstimateSet, PmbmPosterior, PoissonIntensity};
use super::update::update;
use crate::error::Result;
use crate::scalar::Real;

/// A configured filter: models, birth intensity and tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter<T: Real> {
    pub motion: MotionModel<T>,
    pub sensor: SensorModel<T>,
    pub birth: PoissonIntensity<T>,
    pub detection: DetectionModel<T>,
    pub budget: HypothesisBudget,
    pub reduction: ReductionConfig<T>,
    /// Existence threshold for reported tracks.
    pub gamma: T,
}

impl<T: Real> Filter<T> {
    /// Predict, update with `scan`, reduce.
    pub fn step(&self, post: &PmbmPosterior<T>, scan: &[DVector<T>]) -> Result<PmbmPosterior<T>> {
        self.detection.validate()?;
        let predicted = predict(post, &self.motion, &self.birth, &self.detection)?;
        let updated = update(&predicted, scan, &self.sensor, &self.detection, &self.budget)?;
        reduce(&updated, &self.reduction)
    }

    pub fn estimate(&self, post: &PmbmPosterior<T>) -> EstimateSet<T> {
        estimate(post, self.gamma)
    }

    /// The same filter with a known, constant detection probability.
    pub fn with_fixed_pd(&self, p_d: T) -> Self {
        Self { detection: DetectionModel::Fixed { p_d }, ..self.clone() }
    }
}

/// One recursion of the standard PMBM filter with known detection
/// probability `p_d`, using the rest of `filter`'s configuration.
pub fn run_fixed_pd<T: Real>(
    filter: &Filter<T>,
    post: &PmbmPosterior<T>,
    scan: &[DVector<T>],
    p_d: T,
) -> Result<PmbmPosterior<T>> {
    filter.with_fixed_pd(p_d).step(post, scan)
}
