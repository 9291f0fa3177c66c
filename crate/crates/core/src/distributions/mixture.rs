//! Weighted Beta-Gaussian product terms, moment matching and the merge
//! divergence.

use nalgebra::{DMatrix, DVector};

use super::beta::BetaParams;
use super::gaussian::{symmetrize, GaussianComponent};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `weight · β(a; s, t) · N(x; m, P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaGaussianComponent<T: Real> {
    pub weight: T,
    pub beta: BetaParams<T>,
    pub gaussian: GaussianComponent<T>,
}

impl<T: Real> BetaGaussianComponent<T> {
    pub fn new(weight: T, beta: BetaParams<T>, gaussian: GaussianComponent<T>) -> Result<Self> {
        if !(weight >= T::zero()) || !weight.is_finite() {
            return Err(Error::Domain { what: "component weight", value: weight.as_f64() });
        }
        Ok(Self { weight, beta, gaussian })
    }
}

/// Result of collapsing a mixture to one Beta-Gaussian term.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatch<T: Real> {
    pub component: BetaGaussianComponent<T>,
    /// Set when the Beta mixture variance was infeasible and had to be clamped.
    pub variance_clamped: bool,
}

/// Replaces a Beta-Gaussian mixture by the single term with the same first
/// two moments in each marginal. The output weight is the total weight.
pub fn moment_match<T: Real>(components: &[BetaGaussianComponent<T>]) -> Result<MomentMatch<T>> {
    let first = components.first().ok_or(Error::EmptyMixture)?;
    if components.len() == 1 {
        return Ok(MomentMatch { component: first.clone(), variance_clamped: false });
    }
    let total = components.iter().fold(T::zero(), |acc, c| acc + c.weight);
    if !(total > T::zero()) {
        return Err(Error::Domain { what: "mixture weight", value: total.as_f64() });
    }
    let n = first.gaussian.dim();
    if let Some(bad) = components.iter().find(|c| c.gaussian.dim() != n) {
        return Err(Error::DimensionMismatch {
            context: "moment match",
            expected: n.to_string(),
            found: bad.gaussian.dim().to_string(),
        });
    }

    let mut mean = DVector::<T>::zeros(n);
    let mut a_mean = T::zero();
    for c in components {
        let w = c.weight / total;
        mean += &c.gaussian.mean * w;
        a_mean += w * c.beta.mean();
    }
    let mut cov = DMatrix::<T>::zeros(n, n);
    let mut a_var = T::zero();
    for c in components {
        let w = c.weight / total;
        let d = &c.gaussian.mean - &mean;
        cov += (&c.gaussian.covariance + &d * d.transpose()) * w;
        let da = c.beta.mean() - a_mean;
        a_var += w * (c.beta.variance() + da * da);
    }

    let (beta, variance_clamped) = BetaParams::from_moments_clamped(a_mean, a_var)?;
    if variance_clamped {
        log::warn!("moment match clamped Beta variance {a_var} at mean {a_mean}");
    }
    Ok(MomentMatch {
        component: BetaGaussianComponent {
            weight: total,
            beta,
            gaussian: GaussianComponent { mean, covariance: symmetrize(cov) },
        },
        variance_clamped,
    })
}

/// Squared Hellinger distance `1 - BC_gauss · BC_beta` between the
/// normalized product densities.
pub fn hellinger_distance<T: Real>(
    a: &BetaGaussianComponent<T>,
    b: &BetaGaussianComponent<T>,
) -> Result<T> {
    let bc = a.gaussian.bhattacharyya(&b.gaussian)? * a.beta.bhattacharyya(&b.beta);
    Ok((T::one() - bc).max(T::zero()).min(T::one()))
}

/// Cheap lower bound on [`hellinger_distance`] from the Gaussian mean
/// separation; used to skip the full computation for distant pairs.
pub(crate) fn hellinger_lower_bound<T: Real>(
    a: &BetaGaussianComponent<T>,
    b: &BetaGaussianComponent<T>,
) -> T {
    let d = &a.gaussian.mean - &b.gaussian.mean;
    let trace = (a.gaussian.covariance.trace() + b.gaussian.covariance.trace()) * T::lit(0.5);
    if !(trace > T::zero()) {
        return T::zero();
    }
    // dᵀ Σ̄⁻¹ d ≥ |d|² / λ_max(Σ̄) ≥ |d|² / tr(Σ̄), and both determinant
    // ratio factors of the Bhattacharyya coefficient are at most one.
    let bc_bound = (-(d.norm_squared() / trace) / T::lit(8.0)).exp();
    T::one() - bc_bound
}
