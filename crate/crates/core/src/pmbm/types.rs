use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::distributions::{BetaGaussianComponent, BetaParams, GaussianComponent};
use crate::scalar::Real;

/// Opaque identity of a Bernoulli track, assigned at first detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrackId(pub u64);

/// How a track's density was last updated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UpdateKind {
    /// Created from observation `observation` of the current scan.
    Born { observation: usize },
    Missed,
    Detected { observation: usize },
}

impl UpdateKind {
    fn code(self) -> u64 {
        match self {
            UpdateKind::Born { observation } => (observation as u64) << 2 | 1,
            UpdateKind::Missed => 2,
            UpdateKind::Detected { observation } => (observation as u64) << 2 | 3,
        }
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// A potentially detected object: exists with probability `existence` and,
/// if it does, has density `β(a; s, t) N(x; m, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliTrack<T: Real> {
    pub track_id: TrackId,
    pub existence: T,
    pub beta: BetaParams<T>,
    pub gaussian: GaussianComponent<T>,
    /// Log of the factor this track contributed to its hypothesis weight at
    /// the last update.
    pub log_weight_contrib: T,
    pub last_update: UpdateKind,
    /// Digest of the full update history; two tracks with equal id and
    /// lineage carry identical densities.
    pub lineage: u64,
}

impl<T: Real> BernoulliTrack<T> {
    pub(crate) fn born(
        track_id: TrackId,
        existence: T,
        beta: BetaParams<T>,
        gaussian: GaussianComponent<T>,
        log_weight_contrib: T,
        observation: usize,
    ) -> Self {
        let last_update = UpdateKind::Born { observation };
        Self {
            track_id,
            existence,
            beta,
            gaussian,
            log_weight_contrib,
            last_update,
            lineage: splitmix(track_id.0 ^ last_update.code()),
        }
    }

    /// Copy of `self` after an update of the given kind.
    pub(crate) fn evolve(
        &self,
        kind: UpdateKind,
        existence: T,
        beta: BetaParams<T>,
        gaussian: GaussianComponent<T>,
        log_weight_contrib: T,
    ) -> Self {
        Self {
            track_id: self.track_id,
            existence,
            beta,
            gaussian,
            log_weight_contrib,
            last_update: kind,
            lineage: splitmix(self.lineage ^ kind.code()),
        }
    }
}

/// Intensity of the Poisson process of undetected objects: a Beta-Gaussian
/// mixture whose weights are expected object counts.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonIntensity<T: Real> {
    pub components: Vec<BetaGaussianComponent<T>>,
}

impl<T: Real> PoissonIntensity<T> {
    pub fn empty() -> Self {
        Self { components: Vec::new() }
    }

    pub fn new(components: Vec<BetaGaussianComponent<T>>) -> Self {
        Self { components }
    }

    /// Expected number of undetected objects.
    pub fn total_weight(&self) -> T {
        self.components.iter().fold(T::zero(), |acc, c| acc + c.weight)
    }
}

/// One global hypothesis: a log-weight and its Bernoulli tracks. Tracks are
/// shared between hypotheses that agree on them.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalHypothesis<T: Real> {
    pub log_weight: T,
    pub tracks: Vec<Arc<BernoulliTrack<T>>>,
}

impl<T: Real> GlobalHypothesis<T> {
    pub fn weight(&self) -> T {
        self.log_weight.exp()
    }

    /// Order-independent identity used to merge duplicate hypotheses.
    pub fn signature(&self) -> Vec<(TrackId, u64)> {
        let mut sig: Vec<_> = self.tracks.iter().map(|t| (t.track_id, t.lineage)).collect();
        sig.sort_unstable();
        sig
    }
}

/// Poisson multi-Bernoulli mixture posterior over augmented states `(x, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmbmPosterior<T: Real> {
    pub poisson: PoissonIntensity<T>,
    pub hypotheses: Vec<GlobalHypothesis<T>>,
    pub time_index: u64,
    /// Next identifier handed out at first detection.
    pub next_track_id: u64,
}

impl<T: Real> PmbmPosterior<T> {
    /// Empty Poisson intensity and a single empty hypothesis of weight one.
    pub fn initial() -> Self {
        Self {
            poisson: PoissonIntensity::empty(),
            hypotheses: vec![GlobalHypothesis { log_weight: T::zero(), tracks: Vec::new() }],
            time_index: 0,
            next_track_id: 0,
        }
    }

    pub fn best_hypothesis(&self) -> Option<&GlobalHypothesis<T>> {
        self.hypotheses.iter().fold(None, |best: Option<&GlobalHypothesis<T>>, h| match best {
            Some(b) if b.log_weight >= h.log_weight => Some(b),
            _ => Some(h),
        })
    }

    pub fn total_weight(&self) -> T {
        self.hypotheses.iter().fold(T::zero(), |acc, h| acc + h.weight())
    }
}

/// Per-scan point estimate extracted from the most likely hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSet<T: Real> {
    pub states: Vec<(TrackId, DVector<T>)>,
    pub cardinality_count: usize,
    /// Sum of existence probabilities of the reported tracks.
    pub cardinality_expected: T,
    /// Mean detection probability of the reported tracks.
    pub p_d_estimate: Option<T>,
}
