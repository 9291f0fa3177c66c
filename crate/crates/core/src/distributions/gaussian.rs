//! Gaussian densities over the kinematic state and the linear-Gaussian
//! predict/update steps.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{dims, Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent<T: Real> {
    pub mean: DVector<T>,
    pub covariance: DMatrix<T>,
}

impl<T: Real> GaussianComponent<T> {
    pub fn new(mean: DVector<T>, covariance: DMatrix<T>) -> Result<Self> {
        let n = mean.len();
        if covariance.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                context: "gaussian covariance",
                expected: dims(n, n),
                found: dims(covariance.nrows(), covariance.ncols()),
            });
        }
        Ok(Self { mean, covariance })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// `m' = F m`, `P' = F P Fᵀ + Q`.
    pub fn predict(&self, transition: &DMatrix<T>, process_noise: &DMatrix<T>) -> Result<Self> {
        let n = self.dim();
        if transition.shape() != (n, n) || process_noise.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                context: "gaussian predict",
                expected: dims(n, n),
                found: format!(
                    "F {} / Q {}",
                    dims(transition.nrows(), transition.ncols()),
                    dims(process_noise.nrows(), process_noise.ncols())
                ),
            });
        }
        let mean = transition * &self.mean;
        let covariance = symmetrize(transition * &self.covariance * transition.transpose() + process_noise);
        Ok(Self { mean, covariance })
    }

    /// Precomputes the predicted observation, innovation covariance and gain
    /// for observation model `(H, R)`.
    pub fn innovation(&self, observation: &DMatrix<T>, noise: &DMatrix<T>) -> Result<Innovation<T>> {
        let n = self.dim();
        let d = observation.nrows();
        if observation.ncols() != n || noise.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                context: "gaussian update",
                expected: format!("H {}x{n}, R {d}x{d}", d),
                found: format!(
                    "H {} / R {}",
                    dims(observation.nrows(), observation.ncols()),
                    dims(noise.nrows(), noise.ncols())
                ),
            });
        }
        let pht = &self.covariance * observation.transpose();
        let s = symmetrize(observation * &pht + noise);
        let chol = robust_cholesky(s)?;
        let ln_det = chol_ln_det(&chol);
        let gain = chol.solve(&pht.transpose()).transpose();
        let predicted = observation * &self.mean;
        let updated_cov = symmetrize(
            (DMatrix::identity(n, n) - &gain * observation) * &self.covariance,
        );
        Ok(Innovation {
            predicted,
            chol,
            ln_det,
            gain,
            prior_mean: self.mean.clone(),
            updated_cov,
        })
    }

    /// Kalman update with observation `z`; returns the posterior and the
    /// predictive likelihood `N(z; Hm, HPHᵀ + R)`.
    pub fn update(
        &self,
        observation: &DMatrix<T>,
        noise: &DMatrix<T>,
        z: &DVector<T>,
    ) -> Result<(Self, T)> {
        let inn = self.innovation(observation, noise)?;
        let ln_q = inn.ln_likelihood(z)?;
        Ok((inn.posterior(z)?, ln_q.exp()))
    }

    /// Bhattacharyya coefficient `∫ √(N₁ N₂) dx`.
    pub fn bhattacharyya(&self, other: &Self) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "bhattacharyya",
                expected: self.dim().to_string(),
                found: other.dim().to_string(),
            });
        }
        let half = T::lit(0.5);
        let avg = symmetrize((&self.covariance + &other.covariance) * half);
        let chol_avg = robust_cholesky(avg)?;
        let ln_det_avg = chol_ln_det(&chol_avg);
        let ln_det1 = chol_ln_det(&robust_cholesky(self.covariance.clone())?);
        let ln_det2 = chol_ln_det(&robust_cholesky(other.covariance.clone())?);
        let diff = &self.mean - &other.mean;
        let maha = diff.dot(&chol_avg.solve(&diff));
        let ln_bc = -maha / T::lit(8.0) + T::lit(0.25) * (ln_det1 + ln_det2) - half * ln_det_avg;
        Ok(ln_bc.exp().min(T::one()))
    }

    /// Symmetric and no eigenvalue below `-1e-9 · trace`.
    pub fn is_valid_covariance(&self) -> bool {
        is_symmetric_psd(&self.covariance)
    }
}

/// Innovation statistics of one Gaussian under a fixed observation model.
#[derive(Debug, Clone)]
pub struct Innovation<T: Real> {
    pub predicted: DVector<T>,
    chol: Cholesky<T, Dyn>,
    ln_det: T,
    gain: DMatrix<T>,
    prior_mean: DVector<T>,
    updated_cov: DMatrix<T>,
}

impl<T: Real> Innovation<T> {
    fn check(&self, z: &DVector<T>) -> Result<()> {
        if z.len() != self.predicted.len() {
            return Err(Error::DimensionMismatch {
                context: "observation",
                expected: self.predicted.len().to_string(),
                found: z.len().to_string(),
            });
        }
        Ok(())
    }

    /// Squared Mahalanobis distance of `z` from the predicted observation.
    pub fn mahalanobis(&self, z: &DVector<T>) -> Result<T> {
        self.check(z)?;
        let nu = z - &self.predicted;
        Ok(nu.dot(&self.chol.solve(&nu)))
    }

    /// `ln N(z; Hm, S)`.
    pub fn ln_likelihood(&self, z: &DVector<T>) -> Result<T> {
        let maha = self.mahalanobis(z)?;
        let d = T::lit(z.len() as f64);
        Ok(-T::lit(0.5) * (d * T::two_pi().ln() + self.ln_det + maha))
    }

    pub fn posterior(&self, z: &DVector<T>) -> Result<GaussianComponent<T>> {
        self.check(z)?;
        let mean = &self.prior_mean + &self.gain * (z - &self.predicted);
        Ok(GaussianComponent { mean, covariance: self.updated_cov.clone() })
    }
}

/// `(P + Pᵀ) / 2`.
pub fn symmetrize<T: Real>(m: DMatrix<T>) -> DMatrix<T> {
    let t = m.transpose();
    (m + t) * T::lit(0.5)
}

/// Cholesky factorization, retried once with `1e-12 · trace` jitter.
pub fn robust_cholesky<T: Real>(m: DMatrix<T>) -> Result<Cholesky<T, Dyn>> {
    let n = m.nrows();
    let trace = m.trace();
    if let Some(c) = Cholesky::new(m.clone()) {
        return Ok(c);
    }
    if !(trace > T::zero()) {
        return Err(Error::SingularCovariance);
    }
    let jitter = T::lit(1e-12) * trace;
    Cholesky::new(m + DMatrix::identity(n, n) * jitter).ok_or(Error::SingularCovariance)
}

fn chol_ln_det<T: Real>(c: &Cholesky<T, Dyn>) -> T {
    c.l_dirty()
        .diagonal()
        .iter()
        .fold(T::zero(), |acc, &d| acc + d.ln())
        * T::lit(2.0)
}

pub fn is_symmetric_psd<T: Real>(m: &DMatrix<T>) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.iter().fold(T::zero(), |acc, &x| acc.max(x.abs())).max(T::tiny());
    let asym = (m - m.transpose()).iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
    if asym > T::lit(1e-9) * scale {
        return false;
    }
    let trace = m.trace();
    let floor = -T::lit(1e-9) * trace.abs().max(T::tiny());
    m.clone().symmetric_eigenvalues().iter().all(|&e| e >= floor)
}
