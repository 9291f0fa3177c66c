//! Prediction of the Poisson intensity and of every Bernoulli track.

use rustc_hash::FxHashMap;
use std::sync::Arc;

use super::model::{DetectionModel, MotionModel};
use super::types::{BernoulliTrack, GlobalHypothesis, PmbmPosterior, PoissonIntensity};
use crate::distributions::BetaGaussianComponent;
use crate::error::Result;
use crate::scalar::Real;

/// Predicts the posterior one scan ahead and appends the birth intensity.
///
/// Poisson weights and track existences are scaled by the survival
/// probability; hypothesis weights are unchanged. Tracks shared between
/// hypotheses stay shared.
pub fn predict<T: Real>(
    post: &PmbmPosterior<T>,
    motion: &MotionModel<T>,
    birth: &PoissonIntensity<T>,
    detection: &DetectionModel<T>,
) -> Result<PmbmPosterior<T>> {
    let p_s = motion.survival;
    let mut components = Vec::with_capacity(post.poisson.components.len() + birth.components.len());
    for c in &post.poisson.components {
        components.push(BetaGaussianComponent {
            weight: c.weight * p_s,
            beta: detection.predict(&c.beta)?,
            gaussian: c.gaussian.predict(&motion.transition, &motion.process_noise)?,
        });
    }
    components.extend(birth.components.iter().cloned());

    let mut predicted: FxHashMap<*const BernoulliTrack<T>, Arc<BernoulliTrack<T>>> = FxHashMap::default();
    let mut hypotheses = Vec::with_capacity(post.hypotheses.len());
    for h in &post.hypotheses {
        let mut tracks = Vec::with_capacity(h.tracks.len());
        for tr in &h.tracks {
            let key = Arc::as_ptr(tr);
            let next = match predicted.get(&key) {
                Some(p) => Arc::clone(p),
                None => {
                    let p = Arc::new(predict_track(tr, motion, detection)?);
                    predicted.insert(key, Arc::clone(&p));
                    p
                }
            };
            tracks.push(next);
        }
        hypotheses.push(GlobalHypothesis { log_weight: h.log_weight, tracks });
    }

    Ok(PmbmPosterior {
        poisson: PoissonIntensity { components },
        hypotheses,
        time_index: post.time_index + 1,
        next_track_id: post.next_track_id,
    })
}

/// `r' = p_S r`; Gaussian through the dynamics, Beta through variance inflation.
pub fn predict_track<T: Real>(
    tr: &BernoulliTrack<T>,
    motion: &MotionModel<T>,
    detection: &DetectionModel<T>,
) -> Result<BernoulliTrack<T>> {
    Ok(BernoulliTrack {
        existence: tr.existence * motion.survival,
        beta: detection.predict(&tr.beta)?,
        gaussian: tr.gaussian.predict(&motion.transition, &motion.process_noise)?,
        ..tr.clone()
    })
}
