use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::truth::TruthLog;
use crate::scalar::Real;

/// One observation together with where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub position: [f64; 2],
    /// Object id for object-originated points, `None` for clutter.
    pub source: Option<u32>,
}

/// Observations of a single scan.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanData {
    pub measurements: Vec<Measurement>,
}

impl ScanData {
    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn clutter_count(&self) -> usize {
        self.measurements.iter().filter(|m| m.source.is_none()).count()
    }

    pub fn observations<T: Real>(&self) -> Vec<DVector<T>> {
        self.measurements
            .iter()
            .map(|m| DVector::from_vec(vec![T::lit(m.position[0]), T::lit(m.position[1])]))
            .collect()
    }
}

// Stream ids keep the random draws of different kinds independent, so a change
// in one parameter leaves the others' realizations untouched.
const DETECTION_STREAM: u64 = 1;
const CLUTTER_STREAM: u64 = 2;
const SHUFFLE_STREAM: u64 = 3;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn scan_stream(seed: u64, id: u64, scan: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (scan as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(id);
    rng
}

/// Poisson draw by CDF inversion from a single uniform. Counts are monotone
/// in `lambda` for a fixed `u`.
pub fn poisson_inverse(lambda: f64, u: f64) -> usize {
    if lambda <= 0.0 {
        return 0;
    }
    let mut p = (-lambda).exp();
    if p == 0.0 {
        // exp underflow; the caller falls back to a direct sampler
        return usize::MAX;
    }
    let mut cdf = p;
    let mut k = 0usize;
    while u > cdf && k < 100_000 {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
        if p == 0.0 && cdf < u {
            break;
        }
    }
    k
}

/// Synthetic observations for every scan of `truth`.
pub fn generate_measurements(truth: &TruthLog, cfg: &ScenarioConfig, seed: u64) -> Vec<ScanData> {
    let mut det = stream(seed, DETECTION_STREAM);
    let (lo, hi) = (cfg.region.min, cfg.region.max);
    truth
        .scans
        .iter()
        .enumerate()
        .map(|(k, objects)| {
            let mut measurements = Vec::new();
            for o in objects {
                // The noise is drawn whether or not the object is detected.
                let u: f64 = det.gen();
                let nx: f64 = StandardNormal.sample(&mut det);
                let ny: f64 = StandardNormal.sample(&mut det);
                if u < cfg.p_d_true {
                    measurements.push(Measurement {
                        position: [o.state[0] + cfg.sigma_eps * nx, o.state[1] + cfg.sigma_eps * ny],
                        source: Some(o.id),
                    });
                }
            }
            let mut clutter = scan_stream(seed, CLUTTER_STREAM, k);
            let mut count = poisson_inverse(cfg.lambda_c, clutter.gen());
            if count == usize::MAX {
                count = Poisson::new(cfg.lambda_c).expect("positive rate").sample(&mut clutter) as usize;
            }
            for _ in 0..count {
                let x = lo[0] + (hi[0] - lo[0]) * clutter.gen::<f64>();
                let y = lo[1] + (hi[1] - lo[1]) * clutter.gen::<f64>();
                measurements.push(Measurement { position: [x, y], source: None });
            }
            measurements.shuffle(&mut scan_stream(seed, SHUFFLE_STREAM, k));
            ScanData { measurements }
        })
        .collect()
}
