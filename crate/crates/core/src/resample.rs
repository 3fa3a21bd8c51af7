//! Seedable generation of perturbed datasets.
//!
//! Every replicate draws from its own ChaCha8 stream: the generator is keyed
//! by the master seed (expanded with `SeedableRng::seed_from_u64`) and the
//! replicate index selects the ChaCha stream. Replicate `b` therefore depends
//! only on `(master, b)` and replicates can be produced in any order or in
//! parallel. Gaussian variates come from `rand_distr::StandardNormal`
//! (ziggurat); dependency versions are pinned by the lockfile so golden values
//! stay stable.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{Dataset, GaussianLocationModel};
use crate::normal::NormalDist;

/// How a perturbed dataset `D*` is drawn from the observed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResampleScheme {
    /// `n` draws with replacement from the observations.
    NonparametricBootstrap,
    /// `n` i.i.d. draws from `N(center, σ²)`.
    #[default]
    ParametricBootstrap,
    /// `m` draws without replacement; `None` means `m = ⌈n/2⌉`.
    Subsample { m: Option<usize> },
}

impl ResampleScheme {
    /// Size of the datasets produced from a sample of size `n`.
    pub fn output_len(&self, n: usize) -> Result<usize> {
        match *self {
            ResampleScheme::Subsample { m } => {
                let m = m.unwrap_or(n.div_ceil(2));
                if m > n {
                    Err(Error::SubsampleTooLarge { m, n })
                } else if m == 0 {
                    Err(Error::EmptyDataset)
                } else {
                    Ok(m)
                }
            }
            _ => Ok(n),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ResampleScheme::NonparametricBootstrap => "nonparametric",
            ResampleScheme::ParametricBootstrap => "parametric",
            ResampleScheme::Subsample { .. } => "subsample",
        }
    }
}

/// Address of one replicate's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub master: u64,
    pub replicate: u64,
}

impl Seed {
    pub fn new(master: u64, replicate: u64) -> Self {
        Seed { master, replicate }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.replicate);
        rng
    }
}

/// Center `θ̂` of the parametric bootstrap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEstimate(f64);

impl PointEstimate {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(PointEstimate(value))
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Which point estimate centers the parametric bootstrap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CenterPolicy {
    #[default]
    SampleMean,
    Map,
}

impl CenterPolicy {
    pub fn center(&self, model: &GaussianLocationModel, data: &Dataset) -> PointEstimate {
        match self {
            CenterPolicy::SampleMean => point_estimate(data),
            CenterPolicy::Map => map_point_estimate(model, data),
        }
    }
}

/// `θ̂ = X̄ₙ`.
pub fn point_estimate(data: &Dataset) -> PointEstimate {
    PointEstimate(data.mean())
}

/// Posterior mode, which equals the posterior mean for this model.
pub fn map_point_estimate(model: &GaussianLocationModel, data: &Dataset) -> PointEstimate {
    PointEstimate(model.posterior_mean_for(data.len(), data.mean()))
}

pub fn resample(
    scheme: ResampleScheme,
    model: &GaussianLocationModel,
    data: &Dataset,
    center: PointEstimate,
    seed: Seed,
) -> Result<Dataset> {
    let obs = data.observations();
    let n = obs.len();
    let len = scheme.output_len(n)?;
    let mut rng = seed.rng();
    let draws = match scheme {
        ResampleScheme::NonparametricBootstrap => {
            (0..n).map(|_| obs[rng.random_range(0..n)]).collect()
        }
        ResampleScheme::ParametricBootstrap => {
            let sd = model.sigma_sq().sqrt();
            (0..n)
                .map(|_| center.value() + sd * rng.sample::<f64, _>(StandardNormal))
                .collect()
        }
        ResampleScheme::Subsample { .. } => index::sample(&mut rng, n, len)
            .into_iter()
            .map(|i| obs[i])
            .collect(),
    };
    Dataset::new(draws)
}

/// Law of the posterior mean of a parametric-bootstrap replicate.
///
/// With `X̄ₙ* ~ N(center, σ²/n)` the replicate posterior mean `n·X̄ₙ*/(n + σ²/τ²)`
/// is `N(n·center/(n + σ²/τ²), nσ²/(n + σ²/τ²)²)`.
pub fn bootstrap_mean_law(
    model: &GaussianLocationModel,
    data: &Dataset,
    center: PointEstimate,
) -> NormalDist {
    let n = data.len() as f64;
    let denom = n + model.shrinkage();
    NormalDist::new(
        n * center.value() / denom,
        n * model.sigma_sq() / (denom * denom),
    )
    .expect("finite bootstrap law")
}

/// Draws `n` observations i.i.d. `N(theta, σ²)` from the stream `seed`.
pub fn simulate(
    model: &GaussianLocationModel,
    theta: f64,
    n: usize,
    seed: Seed,
) -> Result<Dataset> {
    let center = PointEstimate::new(theta)?;
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut rng = seed.rng();
    let sd = model.sigma_sq().sqrt();
    Dataset::new(
        (0..n)
            .map(|_| center.value() + sd * rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )
}
