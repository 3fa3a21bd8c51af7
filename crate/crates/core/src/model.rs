//! Conjugate Gaussian location model.
//!
//! `θ ~ N(0, τ²)` and, given `θ`, `X₁..Xₙ` i.i.d. `N(θ, σ²)` with `σ²` known.
//! The posterior is `N(n·X̄ₙ / (n + σ²/τ²), (1/τ² + n/σ²)⁻¹)`.

use crate::error::{Error, Result};
use crate::normal::NormalDist;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianLocationModel {
    tau_sq: f64,
    sigma_sq: f64,
}

impl GaussianLocationModel {
    pub fn new(tau_sq: f64, sigma_sq: f64) -> Result<Self> {
        for (name, value) in [("tau_sq", tau_sq), ("sigma_sq", sigma_sq)] {
            if !value.is_finite() {
                return Err(Error::NonFinite);
            }
            if value <= 0.0 {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(GaussianLocationModel { tau_sq, sigma_sq })
    }

    pub fn tau_sq(&self) -> f64 {
        self.tau_sq
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    /// Prior-to-noise shrinkage constant `σ²/τ²`.
    #[inline]
    pub fn shrinkage(&self) -> f64 {
        self.sigma_sq / self.tau_sq
    }

    /// The prior `N(0, τ²)`, i.e. the posterior given no data.
    pub fn prior(&self) -> NormalDist {
        NormalDist::new(0.0, self.tau_sq).expect("validated model")
    }

    /// Posterior mean `n·x̄ / (n + σ²/τ²)` for a sample of size `n` with mean `x̄`.
    #[inline]
    pub fn posterior_mean_for(&self, n: usize, mean: f64) -> f64 {
        let n = n as f64;
        n * mean / (n + self.shrinkage())
    }

    /// Posterior variance `(1/τ² + n/σ²)⁻¹`.
    #[inline]
    pub fn posterior_variance_for(&self, n: usize) -> f64 {
        1.0 / (1.0 / self.tau_sq + n as f64 / self.sigma_sq)
    }

    pub fn posterior(&self, data: &Dataset) -> NormalDist {
        NormalDist::new(
            self.posterior_mean_for(data.len(), data.mean()),
            self.posterior_variance_for(data.len()),
        )
        .expect("finite posterior parameters")
    }
}

/// A non-empty sample of finite observations with its cached mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    observations: Vec<f64>,
    mean: f64,
}

impl Dataset {
    pub fn new(observations: Vec<f64>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if observations.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        // Summing in sorted order makes the mean independent of observation order.
        let mut sorted = observations.clone();
        sorted.sort_by(f64::total_cmp);
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        if !mean.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(Dataset { observations, mean })
    }

    pub fn observations(&self) -> &[f64] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

impl TryFrom<Vec<f64>> for Dataset {
    type Error = Error;

    fn try_from(observations: Vec<f64>) -> Result<Self> {
        Dataset::new(observations)
    }
}

/// Posterior of `model` given `data`.
pub fn posterior(model: &GaussianLocationModel, data: &Dataset) -> NormalDist {
    model.posterior(data)
}
