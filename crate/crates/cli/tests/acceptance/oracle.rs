use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rpmbm::distributions::{BetaGaussianComponent, BetaParams, GaussianComponent};
use rpmbm::pmbm::{
    update, BernoulliTrack, DetectionModel, GlobalHypothesis, HypothesisBudget, PmbmPosterior, PoissonIntensity,
    SensorModel, TrackId, UpdateKind,
};

const SIGMA: f64 = 10.0;

/// Observation likelihood of `z` for a 4-d state with diagonal position
/// variance `var`, written out for the 2x2 isotropic case.
fn likelihood(mean: &[f64; 2], var: f64, z: &[f64; 2]) -> f64 {
    let s = var + SIGMA * SIGMA;
    let d2 = (z[0] - mean[0]).powi(2) + (z[1] - mean[1]).powi(2);
    (-0.5 * d2 / s).exp() / (2.0 * PI * s)
}

struct Prior {
    id: u64,
    r: f64,
    s: f64,
    t: f64,
    pos: [f64; 2],
    var: f64,
}

struct Undetected {
    w: f64,
    s: f64,
    t: f64,
    pos: [f64; 2],
    var: f64,
}

fn gaussian(pos: [f64; 2], var: f64) -> GaussianComponent<f64> {
    let mut cov = DMatrix::identity(4, 4) * 25.0;
    cov[(0, 0)] = var;
    cov[(1, 1)] = var;
    GaussianComponent::new(DVector::from_vec(vec![pos[0], pos[1], 1.0, -1.0]), cov).unwrap()
}

/// Association event: for each observation, `Some(slot)` of the detecting
/// track or `None` for a first detection.
fn events(n_obs: usize, n_tracks: usize) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n_obs {
        let mut next = Vec::new();
        for e in &out {
            next.push([e.clone(), vec![None]].concat());
            for slot in 0..n_tracks {
                if !e.contains(&Some(slot)) {
                    next.push([e.clone(), vec![Some(slot)]].concat());
                }
            }
        }
        out = next;
    }
    out
}

type Key = Vec<(u64, String)>;

fn key_of(tracks: &[Arc<BernoulliTrack<f64>>]) -> Key {
    let mut k: Key = tracks
        .iter()
        .map(|t| {
            let kind = match t.last_update {
                UpdateKind::Born { observation } => format!("new{observation}"),
                UpdateKind::Missed => "miss".into(),
                UpdateKind::Detected { observation } => format!("det{observation}"),
            };
            (t.track_id.0, kind)
        })
        .collect();
    k.sort();
    k
}

fn run_case(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let clutter = 10f64.powf(rng.gen_range(-6.0..-3.0));
    let mut jitter = |scale: f64| rng.gen_range(-scale..scale);
    let undetected: Vec<Undetected> = (0..2)
        .map(|_| Undetected {
            w: 0.03 + jitter(0.02),
            s: 1.5 + jitter(1.0),
            t: 1.5 + jitter(1.0),
            pos: [jitter(30.0), jitter(30.0)],
            var: 400.0 + jitter(300.0),
        })
        .collect();
    let n_hyps = 1 + (jitter(1.0) > 0.0) as usize;
    let mut next_id = 1;
    let mut hyps: Vec<(f64, Vec<Prior>)> = Vec::new();
    for _ in 0..n_hyps {
        let n_tracks = ((jitter(1.0) + 1.0) * 1.5) as usize;
        let tracks = (0..n_tracks.min(2))
            .map(|_| {
                next_id += 1;
                Prior {
                    id: next_id,
                    r: 0.5 + jitter(0.45),
                    s: 3.0 + jitter(2.0),
                    t: 1.5 + jitter(1.0),
                    pos: [jitter(20.0), jitter(20.0)],
                    var: 100.0 + jitter(50.0),
                }
            })
            .collect();
        hyps.push((0.2 + jitter(0.1) + 0.5, tracks));
    }
    let total_w: f64 = hyps.iter().map(|h| h.0).sum();
    let n_obs = 1 + ((jitter(1.0) + 1.0) * 1.5) as usize;
    let obs: Vec<[f64; 2]> = (0..n_obs.min(3)).map(|_| [jitter(25.0), jitter(25.0)]).collect();

    let post = PmbmPosterior {
        poisson: PoissonIntensity::new(
            undetected
                .iter()
                .map(|u| BetaGaussianComponent::new(u.w, BetaParams::new(u.s, u.t).unwrap(), gaussian(u.pos, u.var)).unwrap())
                .collect(),
        ),
        hypotheses: hyps
            .iter()
            .map(|(w, tracks)| GlobalHypothesis {
                log_weight: (w / total_w).ln(),
                tracks: tracks
                    .iter()
                    .map(|p| {
                        Arc::new(BernoulliTrack {
                            track_id: TrackId(p.id),
                            existence: p.r,
                            beta: BetaParams::new(p.s, p.t).unwrap(),
                            gaussian: gaussian(p.pos, p.var),
                            log_weight_contrib: 0.0,
                            last_update: UpdateKind::Missed,
                            lineage: p.id,
                        })
                    })
                    .collect(),
            })
            .collect(),
        time_index: 3,
        next_track_id: 100,
    };
    let sensor = SensorModel::position(SIGMA, clutter, f64::INFINITY);
    let scan: Vec<DVector<f64>> = obs.iter().map(|z| DVector::from_vec(z.to_vec())).collect();
    let out = update(&post, &scan, &sensor, &DetectionModel::Beta { k_beta: 1.0 }, &HypothesisBudget { total: 100_000 })
        .map_err(|e| e.to_string())?;

    // Brute force.
    let rho: Vec<f64> = obs
        .iter()
        .map(|z| clutter + undetected.iter().map(|u| u.w * u.s / (u.s + u.t) * likelihood(&u.pos, u.var, z)).sum::<f64>())
        .collect();
    let mut expected: BTreeMap<Key, f64> = BTreeMap::new();
    for (w, tracks) in &hyps {
        for e in events(obs.len(), tracks.len()) {
            let mut weight = w / total_w;
            let mut key: Key = Vec::new();
            for (slot, p) in tracks.iter().enumerate() {
                match e.iter().position(|&a| a == Some(slot)) {
                    Some(m) => {
                        weight *= p.r * p.s / (p.s + p.t) * likelihood(&p.pos, p.var, &obs[m]);
                        key.push((p.id, format!("det{m}")));
                    }
                    None => {
                        weight *= 1.0 - p.r + p.r * p.t / (p.s + p.t);
                        key.push((p.id, "miss".into()));
                    }
                }
            }
            for (m, a) in e.iter().enumerate() {
                if a.is_none() {
                    weight *= rho[m];
                    key.push((100 + m as u64, format!("new{m}")));
                }
            }
            key.sort();
            *expected.entry(key).or_default() += weight;
        }
    }
    let norm: f64 = expected.values().sum();

    // Children of different parents may coincide; reduction merges them later.
    let mut got: BTreeMap<Key, f64> = BTreeMap::new();
    for h in &out.hypotheses {
        *got.entry(key_of(&h.tracks)).or_default() += h.weight();
    }
    if got.len() != expected.len() {
        return Err(format!("{} distinct children, {} association events", got.len(), expected.len()));
    }
    let mut worst = 0.0f64;
    for (key, w) in &got {
        let want = expected.get(key).ok_or_else(|| format!("child {key:?} matches no association event"))? / norm;
        worst = worst.max((w - want).abs());
    }
    Ok(worst)
}

/// Largest absolute weight error over `n` random instances.
pub fn check(n: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst = 0.0f64;
    for _ in 0..n {
        worst = worst.max(run_case(&mut rng)?);
    }
    if worst < 1e-9 {
        Ok(format!("{n} instances, max weight error {worst:.2e}"))
    } else {
        Err(format!("max weight error {worst:.2e} over {n} instances"))
    }
}
