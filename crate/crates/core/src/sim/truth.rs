use nalgebra::{DVector, Matrix4, SymmetricEigen, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::config::{Region, ScenarioConfig};

/// One object on one scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthState {
    pub id: u32,
    /// `[px, py, vx, vy]`
    pub state: [f64; 4],
}

impl TruthState {
    pub fn position(&self) -> [f64; 2] {
        [self.state[0], self.state[1]]
    }
}

/// Ground truth per scan. `scans[k - 1]` holds the objects alive on scan `k`,
/// ordered by id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TruthLog {
    pub scans: Vec<Vec<TruthState>>,
}

impl TruthLog {
    pub fn len(&self) -> usize {
        self.scans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scans.is_empty()
    }

    pub fn positions(&self, scan_index: usize) -> Vec<DVector<f64>> {
        self.scans[scan_index]
            .iter()
            .map(|o| DVector::from_column_slice(&o.position()))
            .collect()
    }

    pub fn cardinality(&self, scan_index: usize) -> usize {
        self.scans[scan_index].len()
    }
}

/// Matrix square root `L` with `L Lᵀ = m` for a symmetric PSD matrix.
/// Negative eigenvalues from round-off are clamped to zero.
pub(crate) fn psd_sqrt(m: Matrix4<f64>) -> Matrix4<f64> {
    let eig = SymmetricEigen::new(m);
    let d = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    eig.eigenvectors * d
}

pub(crate) fn ncv_matrices(delta_t: f64, sigma_v: f64) -> (Matrix4<f64>, Matrix4<f64>) {
    let f = Matrix4::new(
        1.0, 0.0, delta_t, 0.0, //
        0.0, 1.0, 0.0, delta_t, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    );
    let (d2, d3, d4) = (delta_t.powi(2), delta_t.powi(3) / 2.0, delta_t.powi(4) / 4.0);
    let q = Matrix4::new(
        d4, 0.0, d3, 0.0, //
        0.0, d4, 0.0, d3, //
        d3, 0.0, d2, 0.0, //
        0.0, d3, 0.0, d2,
    ) * sigma_v.powi(2);
    (f, q)
}

fn gaussian_draw(rng: &mut ChaCha8Rng, mean: &Vector4<f64>, sqrt: &Matrix4<f64>) -> Vector4<f64> {
    let u = Vector4::from_fn(|_, _| StandardNormal.sample(rng));
    mean + sqrt * u
}

/// Mirror the position back into the region, flipping the velocity component.
fn reflect(x: &mut Vector4<f64>, region: &Region) {
    for axis in 0..2 {
        let (lo, hi) = (region.min[axis], region.max[axis]);
        let width = hi - lo;
        let mut p = x[axis];
        let mut v = x[axis + 2];
        // A single step may overshoot by more than one width only with absurd
        // velocities; loop until inside.
        while p < lo || p > hi {
            if p < lo {
                p = 2.0 * lo - p;
            } else {
                p = 2.0 * hi - p;
            }
            v = -v;
            if width <= 0.0 {
                p = lo;
                break;
            }
        }
        x[axis] = p;
        x[axis + 2] = v;
    }
}

/// Trajectory redraws before falling back to reflection at the boundary.
const MAX_ATTEMPTS: usize = 1000;

fn inside(x: &Vector4<f64>, region: &Region) -> bool {
    (0..2).all(|a| x[a] >= region.min[a] && x[a] <= region.max[a])
}

/// Ground-truth trajectories for the configured object schedule.
///
/// Each object's whole trajectory is drawn from the birth Gaussian and the
/// motion model, and redrawn if it leaves the region. After
/// `MAX_ATTEMPTS` failures the last draw is kept with its positions
/// reflected back inside.
pub fn generate_truth(cfg: &ScenarioConfig, seed: u64) -> TruthLog {
    let (f, q) = ncv_matrices(cfg.delta_t, cfg.sigma_v);
    let q_sqrt = psd_sqrt(q);
    let birth_sqrt = psd_sqrt(Matrix4::from_fn(|i, j| cfg.birth_cov[i][j]));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let duration = cfg.duration as usize;
    let mut scans: Vec<Vec<TruthState>> = vec![Vec::new(); duration];
    let mut path = Vec::with_capacity(duration);
    for (id, &(birth, death, idx)) in cfg.object_schedule.iter().enumerate() {
        if birth as usize > duration {
            continue;
        }
        let mean = Vector4::from_column_slice(&cfg.birth_means[idx]);
        let steps = (death as usize - 1).min(duration) - birth as usize + 1;
        for attempt in 1..=MAX_ATTEMPTS {
            let reflecting = attempt == MAX_ATTEMPTS;
            path.clear();
            let mut x = gaussian_draw(&mut rng, &mean, &birth_sqrt);
            for step in 0..steps {
                if step > 0 {
                    x = gaussian_draw(&mut rng, &(f * x), &q_sqrt);
                }
                if reflecting {
                    reflect(&mut x, &cfg.region);
                } else if !inside(&x, &cfg.region) {
                    break;
                }
                path.push(x);
            }
            if path.len() == steps {
                break;
            }
        }
        for (step, x) in path.iter().enumerate() {
            scans[birth as usize - 1 + step].push(TruthState { id: id as u32, state: [x[0], x[1], x[2], x[3]] });
        }
    }
    TruthLog { scans }
}
