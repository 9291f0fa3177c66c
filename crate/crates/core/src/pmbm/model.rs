//! Motion, observation and detection models plus the filter tuning knobs.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::distributions::BetaParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Linear-Gaussian dynamics with state-independent survival.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionModel<T: Real> {
    pub transition: DMatrix<T>,
    pub process_noise: DMatrix<T>,
    pub survival: T,
}

impl<T: Real> MotionModel<T> {
    /// Nearly-constant-velocity model on `[px, py, vx, vy]`.
    pub fn ncv(delta_t: T, sigma_v: T, survival: T) -> Self {
        let dt = delta_t;
        let mut transition = DMatrix::identity(4, 4);
        transition[(0, 2)] = dt;
        transition[(1, 3)] = dt;
        let q = sigma_v * sigma_v;
        let dt2 = dt * dt;
        let (a, b, c) = (dt2 * dt2 / T::lit(4.0) * q, dt2 * dt / T::lit(2.0) * q, dt2 * q);
        let mut process_noise = DMatrix::zeros(4, 4);
        for i in 0..2 {
            process_noise[(i, i)] = a;
            process_noise[(i, i + 2)] = b;
            process_noise[(i + 2, i)] = b;
            process_noise[(i + 2, i + 2)] = c;
        }
        Self { transition, process_noise, survival }
    }
}

/// Linear-Gaussian observation model with uniform Poisson clutter and an
/// ellipsoidal validation gate.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorModel<T: Real> {
    pub observation: DMatrix<T>,
    pub noise: DMatrix<T>,
    /// Clutter intensity `c(z) = λ_c / V`.
    pub clutter_density: T,
    /// Squared Mahalanobis gate on the innovation.
    pub gate: T,
}

impl<T: Real> SensorModel<T> {
    /// Position-only observation of `[px, py, vx, vy]` with isotropic noise.
    pub fn position(sigma_eps: T, clutter_density: T, gate: T) -> Self {
        let mut observation = DMatrix::zeros(2, 4);
        observation[(0, 0)] = T::one();
        observation[(1, 1)] = T::one();
        Self {
            observation,
            noise: DMatrix::identity(2, 2) * (sigma_eps * sigma_eps),
            clutter_density,
            gate,
        }
    }
}

/// How the detection probability enters the recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DetectionModel<T> {
    /// Unknown detection probability carried as a Beta marginal; the variance
    /// is inflated by `k_beta` at each prediction.
    Beta { k_beta: T },
    /// Known constant detection probability; Beta marginals are left untouched.
    Fixed { p_d: T },
}

impl<T: Real> DetectionModel<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DetectionModel::Beta { k_beta } if !(k_beta >= T::one()) => {
                Err(Error::Domain { what: "k_beta", value: k_beta.as_f64() })
            }
            DetectionModel::Fixed { p_d } if !(p_d > T::zero() && p_d <= T::one()) => {
                Err(Error::Domain { what: "p_d", value: p_d.as_f64() })
            }
            _ => Ok(()),
        }
    }

    /// Expected detection probability under `beta`.
    #[inline]
    pub fn p_detect(&self, beta: &BetaParams<T>) -> T {
        match *self {
            DetectionModel::Beta { .. } => beta.mean(),
            DetectionModel::Fixed { p_d } => p_d,
        }
    }

    /// Multiplication by `a`: returns the scale and the new Beta marginal.
    #[inline]
    pub fn detected(&self, beta: &BetaParams<T>) -> (T, BetaParams<T>) {
        match *self {
            DetectionModel::Beta { .. } => beta.times_a(),
            DetectionModel::Fixed { p_d } => (p_d, *beta),
        }
    }

    /// Multiplication by `1 - a`.
    #[inline]
    pub fn missed(&self, beta: &BetaParams<T>) -> (T, BetaParams<T>) {
        match *self {
            DetectionModel::Beta { .. } => beta.times_one_minus_a(),
            DetectionModel::Fixed { p_d } => (T::one() - p_d, *beta),
        }
    }

    pub fn predict(&self, beta: &BetaParams<T>) -> Result<BetaParams<T>> {
        match *self {
            DetectionModel::Beta { k_beta } => beta.predict(k_beta),
            DetectionModel::Fixed { .. } => Ok(*beta),
        }
    }
}

/// Murty solutions requested per parent hypothesis:
/// `max(1, ceil(total · w_j))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisBudget {
    pub total: usize,
}

impl HypothesisBudget {
    pub fn solutions_for(&self, weight: f64) -> usize {
        let k = (self.total as f64 * weight).ceil();
        if k.is_finite() && k >= 1.0 {
            k.min(usize::MAX as f64) as usize
        } else {
            1
        }
    }
}

/// Pruning, merging and capping thresholds applied after each update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionConfig<T> {
    /// Poisson components below this weight are dropped.
    pub poisson_prune: T,
    /// Bernoulli tracks below this existence probability are dropped.
    pub bernoulli_prune: T,
    /// Hypotheses below this normalized weight are dropped.
    pub hypothesis_prune: T,
    /// Squared Hellinger distance under which Poisson components merge.
    pub merge_threshold: T,
    pub max_poisson_components: usize,
    pub max_hypotheses: usize,
}

/// Serializable filter settings, all in `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub k_beta: f64,
    /// Existence threshold for reporting a track.
    pub gamma: f64,
    pub poisson_prune: f64,
    pub bernoulli_prune: f64,
    pub hypothesis_prune: f64,
    pub merge_threshold: f64,
    pub max_poisson_components: usize,
    pub max_hypotheses: usize,
    pub k_total: usize,
    pub gate: f64,
    /// Detection probability used by the fixed-p_D mode; defaults to the
    /// scenario's true value when absent.
    pub p_d_fixed: Option<f64>,
    pub ospa_c: f64,
    pub ospa_p: f64,
    /// Inclusive scan window over which the p_D estimate is averaged.
    pub pd_window: [u32; 2],
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            k_beta: 1.05,
            gamma: 0.55,
            poisson_prune: 1e-5,
            bernoulli_prune: 1e-5,
            hypothesis_prune: 1e-4,
            merge_threshold: 0.1,
            max_poisson_components: 100,
            max_hypotheses: 200,
            k_total: 100,
            // 0.999 quantile of chi-square with 2 degrees of freedom.
            gate: 13.815510557964274,
            p_d_fixed: None,
            ospa_c: 100.0,
            ospa_p: 1.0,
            pd_window: [30, 60],
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if !(self.k_beta >= 1.0) {
            return bad("k_beta must be >= 1");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if self.k_total == 0 || self.max_hypotheses == 0 || self.max_poisson_components == 0 {
            return bad("k_total, max_hypotheses and max_poisson_components must be positive");
        }
        if !(self.gate > 0.0) {
            return bad("gate must be positive");
        }
        if let Some(p) = self.p_d_fixed {
            if !(p > 0.0 && p <= 1.0) {
                return bad("p_d_fixed must lie in (0, 1]");
            }
        }
        if !(self.ospa_c > 0.0 && self.ospa_p >= 1.0) {
            return bad("ospa_c must be positive and ospa_p >= 1");
        }
        if self.pd_window[0] > self.pd_window[1] {
            return bad("pd_window must be ordered");
        }
        Ok(())
    }

    pub fn budget(&self) -> HypothesisBudget {
        HypothesisBudget { total: self.k_total }
    }

    pub fn reduction<T: Real>(&self) -> ReductionConfig<T> {
        ReductionConfig {
            poisson_prune: T::lit(self.poisson_prune),
            bernoulli_prune: T::lit(self.bernoulli_prune),
            hypothesis_prune: T::lit(self.hypothesis_prune),
            merge_threshold: T::lit(self.merge_threshold),
            max_poisson_components: self.max_poisson_components,
            max_hypotheses: self.max_hypotheses,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ncv_matrices() {
        let m = MotionModel::<f64>::ncv(1.0, 5.0, 0.97);
        assert_eq!(m.transition[(0, 2)], 1.0);
        assert_eq!(m.process_noise[(0, 0)], 25.0 / 4.0);
        assert_eq!(m.process_noise[(0, 2)], 25.0 / 2.0);
        assert_eq!(m.process_noise[(3, 3)], 25.0);
        assert_eq!(m.process_noise[(0, 1)], 0.0);
    }

    #[test]
    fn budget_allocation() {
        let b = HypothesisBudget { total: 100 };
        assert_eq!(b.solutions_for(1.0), 100);
        assert_eq!(b.solutions_for(0.011), 2);
        assert_eq!(b.solutions_for(0.0), 1);
        assert_eq!(b.solutions_for(f64::NAN), 1);
    }

    #[test]
    fn detection_models() {
        let beta = BetaParams::<f64>::new(19.0, 1.0).unwrap();
        let fixed = DetectionModel::Fixed { p_d: 0.9 };
        assert_eq!(fixed.p_detect(&beta), 0.9);
        assert_eq!(fixed.missed(&beta).1, beta);
        let dynamic = DetectionModel::Beta { k_beta: 1.0 };
        assert!((dynamic.p_detect(&beta) - 0.95).abs() < 1e-15);
        assert_eq!(dynamic.detected(&beta).1.s(), 20.0);
        assert!(DetectionModel::Fixed { p_d: 0.0 }.validate().is_err());
        assert!(DetectionModel::Beta { k_beta: 0.5 }.validate().is_err());
    }

    #[test]
    fn default_config_is_valid() {
        FilterConfig::default().validate().unwrap();
        let cfg = FilterConfig { gamma: 1.5, ..Default::default() };
        assert!(cfg.validate().is_err());
    }
}
