//! Pruning, merging and capping of the posterior.

use std::cmp::Ordering;
use rustc_hash::FxHashMap;
use std::sync::Arc;

use super::model::ReductionConfig;
use super::types::{GlobalHypothesis, PmbmPosterior, PoissonIntensity};
use super::update::normalize;
use crate::distributions::{hellinger_distance, hellinger_lower_bound, moment_match, BetaGaussianComponent};
use crate::error::Result;
use crate::scalar::{log_add_exp, Real};

pub fn reduce<T: Real>(post: &PmbmPosterior<T>, cfg: &ReductionConfig<T>) -> Result<PmbmPosterior<T>> {
    Ok(PmbmPosterior {
        poisson: reduce_poisson(&post.poisson, cfg)?,
        hypotheses: reduce_hypotheses(&post.hypotheses, cfg),
        time_index: post.time_index,
        next_track_id: post.next_track_id,
    })
}

fn by_weight_desc<T: Real>(a: T, b: T) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

/// Drops light components, greedily merges each heaviest remaining component
/// with everything within the merge threshold, then keeps the heaviest
/// `max_poisson_components`.
pub fn reduce_poisson<T: Real>(poisson: &PoissonIntensity<T>, cfg: &ReductionConfig<T>) -> Result<PoissonIntensity<T>> {
    let mut pending: Vec<&BetaGaussianComponent<T>> = poisson
        .components
        .iter()
        .filter(|c| c.weight >= cfg.poisson_prune)
        .collect();
    pending.sort_by(|a, b| by_weight_desc(a.weight, b.weight));

    let mut merged = Vec::new();
    let mut used = vec![false; pending.len()];
    for i in 0..pending.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let anchor = pending[i];
        let mut group = vec![anchor.clone()];
        for j in i + 1..pending.len() {
            if used[j] || hellinger_lower_bound(anchor, pending[j]) >= cfg.merge_threshold {
                continue;
            }
            if hellinger_distance(anchor, pending[j])? < cfg.merge_threshold {
                used[j] = true;
                group.push(pending[j].clone());
            }
        }
        merged.push(moment_match(&group)?.component);
    }
    merged.sort_by(|a, b| by_weight_desc(a.weight, b.weight));
    merged.truncate(cfg.max_poisson_components);
    Ok(PoissonIntensity { components: merged })
}

/// Removes unlikely tracks, merges duplicate hypotheses, prunes light
/// hypotheses and caps their number. At least the best hypothesis survives.
pub fn reduce_hypotheses<T: Real>(hyps: &[GlobalHypothesis<T>], cfg: &ReductionConfig<T>) -> Vec<GlobalHypothesis<T>> {
    let mut out: Vec<GlobalHypothesis<T>> = Vec::with_capacity(hyps.len());
    let mut seen: FxHashMap<Vec<_>, usize> = FxHashMap::default();
    for h in hyps {
        let tracks: Vec<_> = h
            .tracks
            .iter()
            .filter(|t| t.existence >= cfg.bernoulli_prune)
            .map(Arc::clone)
            .collect();
        let pruned = GlobalHypothesis { log_weight: h.log_weight, tracks };
        let sig = pruned.signature();
        match seen.get(&sig) {
            Some(&i) => out[i].log_weight = log_add_exp(out[i].log_weight, pruned.log_weight),
            None => {
                seen.insert(sig, out.len());
                out.push(pruned);
            }
        }
    }
    normalize(&mut out);
    out.sort_by(|a, b| by_weight_desc(a.log_weight, b.log_weight));
    let threshold = cfg.hypothesis_prune.ln();
    let keep = out.iter().take_while(|h| h.log_weight >= threshold).count().max(1);
    out.truncate(keep.min(cfg.max_hypotheses));
    normalize(&mut out);
    out
}
