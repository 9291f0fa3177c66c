//! Measurement update: undetected objects, first detections, misdetections
//! and detections of existing tracks, then global hypothesis construction
//! by ranked assignment.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use nalgebra::{DMatrix, DVector};

use super::model::{DetectionModel, HypothesisBudget, SensorModel};
use super::types::{BernoulliTrack, GlobalHypothesis, PmbmPosterior, PoissonIntensity, TrackId, UpdateKind};
use crate::assignment::{is_forbidden, kbest_sparse, CostMatrix, SparseCosts};
use crate::distributions::{moment_match, BetaGaussianComponent, BetaParams, GaussianComponent, Innovation};
use crate::error::Result;
use crate::scalar::{log_sum_exp, Real};

/// Thins the intensity by the misdetection probability: each component is
/// multiplied by `1 - a`.
pub fn update_undetected<T: Real>(poisson: &PoissonIntensity<T>, detection: &DetectionModel<T>) -> PoissonIntensity<T> {
    let components = poisson
        .components
        .iter()
        .map(|c| {
            let (scale, beta) = detection.missed(&c.beta);
            BetaGaussianComponent { weight: c.weight * scale, beta, gaussian: c.gaussian.clone() }
        })
        .collect();
    PoissonIntensity { components }
}

/// Outcome of treating an observation as the first detection of an object.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstDetection<T: Real> {
    /// `ρ^p(z) = e(z) + c(z)`.
    pub rho: T,
    pub track: BernoulliTrack<T>,
}

/// First-detection hypothesis for observation `z` against the predicted
/// Poisson intensity. The new track gets `track_id` and `observation` as its
/// birth record.
pub fn first_detection<T: Real>(
    poisson: &PoissonIntensity<T>,
    z: &DVector<T>,
    sensor: &SensorModel<T>,
    detection: &DetectionModel<T>,
    track_id: TrackId,
    observation: usize,
) -> Result<FirstDetection<T>> {
    let innovations = poisson
        .components
        .iter()
        .map(|c| c.gaussian.innovation(&sensor.observation, &sensor.noise))
        .collect::<Result<Vec<_>>>()?;
    first_detection_with(poisson, &innovations, z, sensor, detection, track_id, observation)
}

pub(crate) fn first_detection_with<T: Real>(
    poisson: &PoissonIntensity<T>,
    innovations: &[Innovation<T>],
    z: &DVector<T>,
    sensor: &SensorModel<T>,
    detection: &DetectionModel<T>,
    track_id: TrackId,
    observation: usize,
) -> Result<FirstDetection<T>> {
    let mut terms = Vec::new();
    let mut e = T::zero();
    for (c, inn) in poisson.components.iter().zip(innovations) {
        if inn.mahalanobis(z)? > sensor.gate {
            continue;
        }
        let (scale, beta) = detection.detected(&c.beta);
        let weight = c.weight * scale * inn.ln_likelihood(z)?.exp();
        if !(weight > T::zero()) {
            continue;
        }
        e += weight;
        terms.push(BetaGaussianComponent { weight, beta, gaussian: inn.posterior(z)? });
    }
    let rho = e + sensor.clutter_density;
    if terms.is_empty() {
        let n = sensor.observation.ncols();
        let placeholder = GaussianComponent::new(DVector::zeros(n), DMatrix::identity(n, n))?;
        let track = BernoulliTrack::born(track_id, T::zero(), BetaParams::uniform(), placeholder, rho.ln(), observation);
        return Ok(FirstDetection { rho, track });
    }
    let matched = moment_match(&terms)?.component;
    let existence = e / rho;
    let track = BernoulliTrack::born(track_id, existence, matched.beta, matched.gaussian, rho.ln(), observation);
    Ok(FirstDetection { rho, track })
}

/// Misdetection of an existing track. Returns `ln(1 - r + r q)` with `q` the
/// expected misdetection probability, and the updated track.
pub fn misdetect_track<T: Real>(tr: &BernoulliTrack<T>, detection: &DetectionModel<T>) -> (T, BernoulliTrack<T>) {
    let (q, beta) = detection.missed(&tr.beta);
    let r = tr.existence;
    let kept = r * q;
    let denom = T::one() - r + kept;
    let existence = if denom > T::zero() { (kept / denom).min(T::one()) } else { T::zero() };
    let delta = denom.ln();
    let next = tr.evolve(UpdateKind::Missed, existence, beta, tr.gaussian.clone(), delta);
    (delta, next)
}

/// Detection of an existing track by `z`. Returns `ln(r p q(z))` and the
/// updated track, whose existence becomes one.
pub fn detect_track<T: Real>(
    tr: &BernoulliTrack<T>,
    z: &DVector<T>,
    observation: usize,
    sensor: &SensorModel<T>,
    detection: &DetectionModel<T>,
) -> Result<(T, BernoulliTrack<T>)> {
    let inn = tr.gaussian.innovation(&sensor.observation, &sensor.noise)?;
    detect_with(tr, &inn, z, observation, detection)
}

fn detect_with<T: Real>(
    tr: &BernoulliTrack<T>,
    inn: &Innovation<T>,
    z: &DVector<T>,
    observation: usize,
    detection: &DetectionModel<T>,
) -> Result<(T, BernoulliTrack<T>)> {
    let (p, beta) = detection.detected(&tr.beta);
    let delta = tr.existence.ln() + p.ln() + inn.ln_likelihood(z)?;
    let next = tr.evolve(UpdateKind::Detected { observation }, T::one(), beta, inn.posterior(z)?, delta);
    Ok((delta, next))
}

/// Cost matrix of one hypothesis: `−ln(ω(z)/ω(∅))` for track columns
/// (`None` = gated out) and `−ln ρ^p(z)` on the new-object diagonal.
///
/// `log_ratios[m][n]` is the log weight ratio of observation `m` updating
/// track `n`.
pub fn build_cost_matrix<T: Real>(rho: &[T], log_ratios: &[Vec<Option<T>>]) -> Result<CostMatrix<T>> {
    let n_o = log_ratios.first().map_or(0, Vec::len);
    let track_costs: Vec<Vec<T>> = log_ratios
        .iter()
        .map(|row| row.iter().map(|r| r.map_or(T::infinity(), |x| -x)).collect())
        .collect();
    let new_costs: Vec<T> = rho
        .iter()
        .map(|&r| if r > T::zero() { -r.ln() } else { T::infinity() })
        .collect();
    CostMatrix::with_new_object_block(&track_costs, &new_costs, n_o)
}

/// Every way one prior track can be updated this scan.
struct TrackOutcomes<T: Real> {
    miss_delta: T,
    missed: Arc<BernoulliTrack<T>>,
    /// Gated-in observations, ascending.
    detections: Vec<(usize, T, Arc<BernoulliTrack<T>>)>,
}

impl<T: Real> TrackOutcomes<T> {
    fn detection(&self, m: usize) -> Option<&(usize, T, Arc<BernoulliTrack<T>>)> {
        self.detections.binary_search_by_key(&m, |d| d.0).ok().map(|i| &self.detections[i])
    }
}

/// Most negative log-ratio baseline used when a misdetection is impossible.
const MIN_LOG_WEIGHT: f64 = -700.0;

/// Full update of a predicted posterior with scan `scan`.
///
/// Each parent hypothesis `j` spawns up to `max(1, ceil(K w_j))` children,
/// one per ranked assignment of its cost matrix. Child log-weights are the
/// parent's plus the exact per-track and per-observation contributions, and
/// are normalized at the end.
pub fn update<T: Real>(
    post: &PmbmPosterior<T>,
    scan: &[DVector<T>],
    sensor: &SensorModel<T>,
    detection: &DetectionModel<T>,
    budget: &HypothesisBudget,
) -> Result<PmbmPosterior<T>> {
    let n_obs = scan.len();
    let poisson_innovations = post
        .poisson
        .components
        .iter()
        .map(|c| c.gaussian.innovation(&sensor.observation, &sensor.noise))
        .collect::<Result<Vec<_>>>()?;
    let mut new_tracks = Vec::with_capacity(n_obs);
    for (m, z) in scan.iter().enumerate() {
        let id = TrackId(post.next_track_id + m as u64);
        let fd = first_detection_with(&post.poisson, &poisson_innovations, z, sensor, detection, id, m)?;
        new_tracks.push((fd.rho, Arc::new(fd.track)));
    }
    let poisson = update_undetected(&post.poisson, detection);

    let mut index: FxHashMap<*const BernoulliTrack<T>, usize> = FxHashMap::default();
    let mut outcomes: Vec<TrackOutcomes<T>> = Vec::new();
    for h in &post.hypotheses {
        for tr in &h.tracks {
            let key = Arc::as_ptr(tr);
            if index.contains_key(&key) {
                continue;
            }
            let (miss_delta, missed) = misdetect_track(tr, detection);
            let inn = tr.gaussian.innovation(&sensor.observation, &sensor.noise)?;
            let mut detections = Vec::new();
            if tr.existence > T::zero() {
                for (m, z) in scan.iter().enumerate() {
                    if inn.mahalanobis(z)? <= sensor.gate {
                        let (d, t) = detect_with(tr, &inn, z, m, detection)?;
                        detections.push((m, d, Arc::new(t)));
                    }
                }
            }
            index.insert(key, outcomes.len());
            outcomes.push(TrackOutcomes { miss_delta, missed: Arc::new(missed), detections });
        }
    }

    let rho: Vec<T> = new_tracks.iter().map(|(r, _)| *r).collect();
    let floor = T::lit(MIN_LOG_WEIGHT);
    let mut children = Vec::new();
    for h in &post.hypotheses {
        let slots: Vec<&TrackOutcomes<T>> = h.tracks.iter().map(|t| &outcomes[index[&Arc::as_ptr(t)]]).collect();
        let n_o = slots.len();
        let mut counts = vec![1usize; n_obs];
        for o in &slots {
            o.detections.iter().for_each(|d| counts[d.0] += 1);
        }
        let mut rows: Vec<Vec<(usize, T)>> = counts.into_iter().map(Vec::with_capacity).collect();
        for (n, o) in slots.iter().enumerate() {
            let base = o.miss_delta.max(floor);
            for &(m, d, _) in &o.detections {
                let cost = base - d;
                if !is_forbidden(cost) {
                    rows[m].push((n, cost));
                }
            }
        }
        for (m, row) in rows.iter_mut().enumerate() {
            let cost = -rho[m].ln();
            if !is_forbidden(cost) {
                row.push((n_o + m, cost));
            }
        }
        let costs = SparseCosts::from_parts(n_o + n_obs, rows);
        let k = budget.solutions_for(h.log_weight.exp().as_f64());
        for a in kbest_sparse(&costs, k) {
            let mut assigned = vec![None; n_o];
            let mut born = Vec::new();
            for (m, &col) in a.row_to_column.iter().enumerate() {
                if col < n_o {
                    assigned[col] = Some(m);
                } else {
                    born.push(m);
                }
            }
            let mut log_weight = h.log_weight;
            let mut tracks = Vec::with_capacity(n_o + born.len());
            for (o, m) in slots.iter().zip(&assigned) {
                match m {
                    Some(m) => {
                        let (_, d, t) = o.detection(*m).expect("assigned pairs are gated in");
                        log_weight += *d;
                        tracks.push(Arc::clone(t));
                    }
                    None => {
                        log_weight += o.miss_delta;
                        tracks.push(Arc::clone(&o.missed));
                    }
                }
            }
            for m in born {
                log_weight += rho[m].ln();
                tracks.push(Arc::clone(&new_tracks[m].1));
            }
            children.push(GlobalHypothesis { log_weight, tracks });
        }
    }
    normalize(&mut children);

    Ok(PmbmPosterior {
        poisson,
        hypotheses: children,
        time_index: post.time_index,
        next_track_id: post.next_track_id + n_obs as u64,
    })
}

/// Normalizes log-weights in place and drops zero-weight hypotheses. If every
/// hypothesis has zero weight they are kept with uniform weights.
pub fn normalize<T: Real>(hyps: &mut Vec<GlobalHypothesis<T>>) {
    if hyps.is_empty() {
        return;
    }
    let lws: Vec<T> = hyps.iter().map(|h| h.log_weight).collect();
    let total = log_sum_exp(&lws);
    if !total.is_finite() {
        log::warn!("all {} hypotheses have zero weight; resetting to uniform", hyps.len());
        let uniform = -T::lit(hyps.len() as f64).ln();
        hyps.iter_mut().for_each(|h| h.log_weight = uniform);
        return;
    }
    hyps.retain(|h| h.log_weight > T::neg_infinity());
    hyps.iter_mut().for_each(|h| h.log_weight -= total);
}
