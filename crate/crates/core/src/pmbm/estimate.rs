use super::types::{EstimateSet, PmbmPosterior};
use crate::scalar::Real;

/// Reads the state estimate off the most likely hypothesis: tracks with
/// existence above `gamma`, their count and summed existence, and the mean
/// of their Beta marginals as the detection probability estimate.
pub fn estimate<T: Real>(post: &PmbmPosterior<T>, gamma: T) -> EstimateSet<T> {
    let Some(best) = post.best_hypothesis() else {
        return EstimateSet { states: Vec::new(), cardinality_count: 0, cardinality_expected: T::zero(), p_d_estimate: None };
    };
    let selected: Vec<_> = best.tracks.iter().filter(|t| t.existence > gamma).collect();
    let cardinality_expected = selected.iter().fold(T::zero(), |acc, t| acc + t.existence);
    let p_d_estimate = (!selected.is_empty()).then(|| {
        selected.iter().fold(T::zero(), |acc, t| acc + t.beta.mean()) / T::lit(selected.len() as f64)
    });
    EstimateSet {
        states: selected.iter().map(|t| (t.track_id, t.gaussian.mean.clone())).collect(),
        cardinality_count: selected.len(),
        cardinality_expected,
        p_d_estimate,
    }
}
