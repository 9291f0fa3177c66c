use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::{BetaGaussianComponent, BetaParams, GaussianComponent};
use crate::error::{Error, Result};
use crate::pmbm::{DetectionModel, Filter, FilterConfig, MotionModel, PoissonIntensity, SensorModel};
use crate::scalar::Real;
use nalgebra::{DMatrix, DVector};

/// Axis-aligned surveillance rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Region {
    pub fn area(&self) -> f64 {
        (self.max[0] - self.min[0]) * (self.max[1] - self.min[1])
    }
}

/// Which recursion the filter runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterMode {
    /// Joint estimation of states and detection probability.
    RPmbm,
    /// Standard recursion with the configured known detection probability.
    FixedPd,
}

impl std::str::FromStr for FilterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r-pmbm" => Ok(FilterMode::RPmbm),
            "fixed-pd" => Ok(FilterMode::FixedPd),
            other => Err(Error::Config(format!("unknown mode `{other}` (expected r-pmbm or fixed-pd)"))),
        }
    }
}

/// Scenario and filter configuration. Keys of the TOML file match the field
/// names; `filter` is an optional table of tuning knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub region: Region,
    /// Number of scans.
    pub duration: u32,
    pub delta_t: f64,
    /// Process noise standard deviation (m/s²).
    pub sigma_v: f64,
    /// Observation noise standard deviation per axis (m).
    pub sigma_eps: f64,
    pub p_s: f64,
    pub p_d_true: f64,
    /// Mean number of clutter points per scan.
    pub lambda_c: f64,
    /// Birth Gaussian means `[px, py, vx, vy]`.
    pub birth_means: Vec<[f64; 4]>,
    pub birth_cov: [[f64; 4]; 4],
    pub birth_weight: f64,
    /// Beta shapes `(s_b, t_b)` of every birth component.
    pub birth_beta: [f64; 2],
    /// `(birth scan, death scan, birth mean index)`. An object is present on
    /// scans `birth ≤ k < death`; scans are numbered from 1.
    pub object_schedule: Vec<(u32, u32, usize)>,
    #[serde(default)]
    pub filter: FilterConfig,
}

impl Default for ScenarioConfig {
    /// The 4500 m × 4500 m, 80-scan study with eleven birth locations.
    fn default() -> Self {
        let birth_means = [
            [1000.0, 2300.0],
            [3000.0, 1200.0],
            [2000.0, 2000.0],
            [2000.0, 3500.0],
            [800.0, 3000.0],
            [2500.0, 1500.0],
            [3800.0, 2000.0],
            [3800.0, 3400.0],
            [4000.0, 2500.0],
            [3900.0, 1500.0],
            [1200.0, 1200.0],
        ]
        .iter()
        .map(|p| [p[0], p[1], 0.0, 0.0])
        .collect();
        let mut birth_cov = [[0.0; 4]; 4];
        for (i, row) in birth_cov.iter_mut().enumerate() {
            row[i] = 60.0 * 60.0;
        }
        let births = [1, 1, 1, 10, 10, 20, 20, 30, 30, 40, 40, 50];
        let object_schedule = births
            .iter()
            .enumerate()
            .map(|(i, &b)| (b, if i < 4 { 60 } else { 81 }, i % 11))
            .collect();
        Self {
            region: Region { min: [0.0, 0.0], max: [4500.0, 4500.0] },
            duration: 80,
            delta_t: 1.0,
            sigma_v: 5.0,
            sigma_eps: 10.0,
            p_s: 0.97,
            p_d_true: 0.95,
            lambda_c: 10.0,
            birth_means,
            birth_cov,
            birth_weight: 0.03,
            birth_beta: [1.0, 1.0],
            object_schedule,
            filter: FilterConfig::default(),
        }
    }
}

/// Smallest clutter rate the filter assumes, so that every observation can be
/// explained when the scenario itself is clutter-free.
const MIN_FILTER_CLUTTER_RATE: f64 = 1e-6;

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.p_d_true > 0.0 && self.p_d_true <= 1.0) {
            return bad(format!("p_d_true = {} must lie in (0, 1]", self.p_d_true));
        }
        if !(self.lambda_c >= 0.0) {
            return bad(format!("lambda_c = {} must be nonnegative", self.lambda_c));
        }
        if self.duration == 0 {
            return bad("duration must be positive".into());
        }
        if !(self.region.max[0] > self.region.min[0] && self.region.max[1] > self.region.min[1]) {
            return bad("region max must exceed min".into());
        }
        if !(self.delta_t > 0.0 && self.sigma_v >= 0.0 && self.sigma_eps > 0.0) {
            return bad("delta_t and sigma_eps must be positive, sigma_v nonnegative".into());
        }
        if !(self.p_s >= 0.0 && self.p_s <= 1.0) {
            return bad(format!("p_s = {} must lie in [0, 1]", self.p_s));
        }
        if self.birth_means.is_empty() || !(self.birth_weight >= 0.0) {
            return bad("need at least one birth mean and a nonnegative birth weight".into());
        }
        if !(self.birth_beta[0] > 0.0 && self.birth_beta[1] > 0.0) {
            return bad("birth_beta shapes must be positive".into());
        }
        for (i, &(birth, death, idx)) in self.object_schedule.iter().enumerate() {
            if birth == 0 || death <= birth || idx >= self.birth_means.len() {
                return bad(format!("object_schedule[{i}] = ({birth}, {death}, {idx}) is invalid"));
            }
        }
        self.filter.validate()
    }

    pub fn clutter_density(&self) -> f64 {
        self.lambda_c / self.region.area()
    }

    pub fn motion<T: Real>(&self) -> MotionModel<T> {
        MotionModel::ncv(T::lit(self.delta_t), T::lit(self.sigma_v), T::lit(self.p_s))
    }

    pub fn sensor<T: Real>(&self) -> SensorModel<T> {
        let rate = self.lambda_c.max(MIN_FILTER_CLUTTER_RATE);
        SensorModel::position(T::lit(self.sigma_eps), T::lit(rate / self.region.area()), T::lit(self.filter.gate))
    }

    pub fn birth<T: Real>(&self) -> Result<PoissonIntensity<T>> {
        let beta = BetaParams::new(T::lit(self.birth_beta[0]), T::lit(self.birth_beta[1]))?;
        let cov = DMatrix::from_fn(4, 4, |i, j| T::lit(self.birth_cov[i][j]));
        self.birth_means
            .iter()
            .map(|m| {
                let g = GaussianComponent::new(DVector::from_iterator(4, m.iter().map(|&x| T::lit(x))), cov.clone())?;
                BetaGaussianComponent::new(T::lit(self.birth_weight), beta, g)
            })
            .collect::<Result<Vec<_>>>()
            .map(PoissonIntensity::new)
    }

    pub fn fixed_p_d(&self) -> f64 {
        self.filter.p_d_fixed.unwrap_or(self.p_d_true)
    }

    pub fn build_filter<T: Real>(&self, mode: FilterMode) -> Result<Filter<T>> {
        let detection = match mode {
            FilterMode::RPmbm => DetectionModel::Beta { k_beta: T::lit(self.filter.k_beta) },
            FilterMode::FixedPd => DetectionModel::Fixed { p_d: T::lit(self.fixed_p_d()) },
        };
        detection.validate()?;
        Ok(Filter {
            motion: self.motion(),
            sensor: self.sensor(),
            birth: self.birth()?,
            detection,
            budget: self.filter.budget(),
            reduction: self.filter.reduction(),
            gamma: T::lit(self.filter.gamma),
        })
    }
}
