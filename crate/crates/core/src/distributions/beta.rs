//! Beta densities over the detection probability `a ∈ [0, 1]`.

use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta as ln_beta_f64;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Shape pair `(s, t)` of the Beta density `a^(s-1) (1-a)^(t-1) / B(s, t)`.
///
/// Both shapes are strictly positive. Uniform birth priors need `s = t = 1`,
/// and variance inflation during prediction can push a shape below one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams<T> {
    s: T,
    t: T,
}

impl<T: Real> BetaParams<T> {
    pub fn new(s: T, t: T) -> Result<Self> {
        if !(s > T::zero() && s.is_finite()) {
            return Err(Error::Domain { what: "beta shape s", value: s.as_f64() });
        }
        if !(t > T::zero() && t.is_finite()) {
            return Err(Error::Domain { what: "beta shape t", value: t.as_f64() });
        }
        Ok(Self { s, t })
    }

    /// The uniform density on `[0, 1]`.
    pub fn uniform() -> Self {
        Self { s: T::one(), t: T::one() }
    }

    /// Recovers the shapes from a mean and variance via
    /// `s = (μ(1-μ)/σ² - 1) μ`, `t = (μ(1-μ)/σ² - 1)(1 - μ)`.
    ///
    /// This is the exact inverse of [`mean`](Self::mean) /
    /// [`variance`](Self::variance).
    pub fn from_moments(mean: T, variance: T) -> Result<Self> {
        let invalid = || Error::InvalidMoments { mean: mean.as_f64(), variance: variance.as_f64() };
        if !(mean > T::zero() && mean < T::one()) || !(variance > T::zero()) {
            return Err(invalid());
        }
        let spread = mean * (T::one() - mean) / variance - T::one();
        if !(spread > T::zero()) || !spread.is_finite() {
            return Err(invalid());
        }
        Self::new(spread * mean, spread * (T::one() - mean)).map_err(|_| invalid())
    }

    /// Like [`from_moments`](Self::from_moments) but clamps an infeasible
    /// variance to `0.999 μ(1-μ)`. The flag reports whether clamping happened.
    pub fn from_moments_clamped(mean: T, variance: T) -> Result<(Self, bool)> {
        match Self::from_moments(mean, variance) {
            Ok(b) => Ok((b, false)),
            Err(_) if mean > T::zero() && mean < T::one() => {
                let ceiling = T::lit(0.999) * mean * (T::one() - mean);
                let v = if variance > T::zero() && variance < ceiling { variance } else { ceiling };
                Self::from_moments(mean, v).map(|b| (b, true))
            }
            Err(e) => Err(e),
        }
    }

    #[inline]
    pub fn s(&self) -> T {
        self.s
    }

    #[inline]
    pub fn t(&self) -> T {
        self.t
    }

    #[inline]
    pub fn mean(&self) -> T {
        self.s / (self.s + self.t)
    }

    #[inline]
    pub fn variance(&self) -> T {
        let n = self.s + self.t;
        self.s * self.t / (n * n * (n + T::one()))
    }

    /// `ln B(s, t)`.
    pub fn ln_norm(&self) -> T {
        ln_beta(self.s, self.t)
    }

    pub fn pdf(&self, a: T) -> Result<T> {
        self.ln_pdf(a).map(|l| l.exp())
    }

    pub fn ln_pdf(&self, a: T) -> Result<T> {
        let domain = || Error::Domain { what: "beta argument a", value: a.as_f64() };
        if !(a >= T::zero() && a <= T::one()) {
            return Err(domain());
        }
        let one = T::one();
        if (a == T::zero() && self.s < one) || (a == one && self.t < one) {
            return Err(domain());
        }
        let term = |shape: T, x: T| {
            if shape == one {
                T::zero()
            } else {
                (shape - one) * x.ln()
            }
        };
        Ok(term(self.s, a) + term(self.t, one - a) - self.ln_norm())
    }

    /// Moment-preserving prediction: the mean is kept, the variance is
    /// multiplied by `k_beta ≥ 1`.
    pub fn predict(&self, k_beta: T) -> Result<Self> {
        if !(k_beta >= T::one()) {
            return Err(Error::Domain { what: "k_beta", value: k_beta.as_f64() });
        }
        if k_beta == T::one() {
            return Ok(*self);
        }
        Self::from_moments(self.mean(), k_beta * self.variance())
    }

    /// `a β(a; s, t) = s/(s+t) · β(a; s+1, t)`; returns the scale and the
    /// shifted density.
    pub fn times_a(&self) -> (T, Self) {
        (self.mean(), Self { s: self.s + T::one(), t: self.t })
    }

    /// `(1-a) β(a; s, t) = t/(s+t) · β(a; s, t+1)`.
    pub fn times_one_minus_a(&self) -> (T, Self) {
        (self.t / (self.s + self.t), Self { s: self.s, t: self.t + T::one() })
    }

    /// Bhattacharyya coefficient `∫ √(β₁ β₂) da`.
    pub fn bhattacharyya(&self, other: &Self) -> T {
        let half = T::lit(0.5);
        let mid = ln_beta(half * (self.s + other.s), half * (self.t + other.t));
        (mid - half * (self.ln_norm() + other.ln_norm())).exp()
    }
}

/// `ln B(s, t)` evaluated in double precision.
pub fn ln_beta<T: Real>(s: T, t: T) -> T {
    T::lit(ln_beta_f64(s.as_f64(), t.as_f64()))
}
