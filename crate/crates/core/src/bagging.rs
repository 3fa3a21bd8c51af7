//! The bagged posterior: `F_bag(u) = E*[F(u | D*)]`.
//!
//! For the Gaussian location model under the parametric bootstrap the
//! expectation has a closed form. Averaging `Φ((u - r)/s)` over
//! `r ~ N(m, v)` gives `Φ((u - m)/√(s² + v))`, so the bagged posterior is
//! normal with the posterior variance and the bootstrap-mean variance added.
//! [`bayesbag_quadrature`] integrates the same expectation numerically and is
//! kept as an independent check of that identity. [`bayesbag_mc`] is the
//! general Monte Carlo route: an equal-weight mixture of `B` replicate
//! posteriors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Dataset, GaussianLocationModel};
use crate::normal::{std_normal_cdf, NormalDist};
use crate::quadrature::{rule_128, rule_64};
use crate::resample::{bootstrap_mean_law, resample, CenterPolicy, ResampleScheme, Seed};

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x0bad_5eed_2014_0131;

/// Replicate count matching the thousand bootstrapped curves of the reference figure.
pub const DEFAULT_REPLICATES: usize = 1000;

/// A univariate distribution that can be evaluated and inverted.
pub trait UnivariateCdf: Send + Sync {
    fn cdf(&self, u: f64) -> f64;

    fn quantile(&self, p: f64) -> Result<f64>;

    /// Point masses cannot be inverted and are skipped when bracketing.
    fn is_degenerate(&self) -> bool {
        false
    }
}

impl UnivariateCdf for NormalDist {
    fn cdf(&self, u: f64) -> f64 {
        NormalDist::cdf(self, u)
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        NormalDist::quantile(self, p)
    }

    fn is_degenerate(&self) -> bool {
        NormalDist::is_degenerate(self)
    }
}

/// Equal-weight mixture of `B ≥ 1` component CDFs.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureCdf<C = NormalDist> {
    components: Vec<C>,
    identical: bool,
}

impl<C: UnivariateCdf + PartialEq> MixtureCdf<C> {
    pub fn new(components: Vec<C>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::NoReplicates);
        }
        let identical = components[1..].iter().all(|c| *c == components[0]);
        Ok(MixtureCdf {
            components,
            identical,
        })
    }

    pub fn components(&self) -> &[C] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `(1/B)·Σ F_b(u)`.
    pub fn eval(&self, u: f64) -> f64 {
        if self.identical {
            return self.components[0].cdf(u);
        }
        let sum: f64 = self.components.iter().map(|c| c.cdf(u)).sum();
        (sum / self.components.len() as f64).clamp(0.0, 1.0)
    }

    /// Inverts the mixture CDF by bracketing and bisection.
    ///
    /// The initial bracket spans the components' own `p`-quantiles; it is
    /// widened by doubling whenever point-mass components push the mixture
    /// outside it.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        if self.components.iter().all(|c| c.is_degenerate()) {
            return Err(Error::DegenerateMixture);
        }
        if self.identical {
            return self.components[0].quantile(p);
        }

        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in self.components.iter().filter(|c| !c.is_degenerate()) {
            let q = c.quantile(p)?;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        let mut step = (hi - lo).max(1e-8 * (1.0 + lo.abs().max(hi.abs())));
        while self.eval(lo) > p {
            lo -= step;
            step *= 2.0;
            if !lo.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        let mut step = (hi - lo).max(1e-8 * (1.0 + lo.abs().max(hi.abs())));
        while self.eval(hi) < p {
            hi += step;
            step *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NonFinite);
            }
        }

        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // hi is the smallest float found with F(hi) >= p
        Ok(if (self.eval(lo) - p).abs() < (self.eval(hi) - p).abs() {
            lo
        } else {
            hi
        })
    }
}

impl<C: UnivariateCdf + PartialEq> UnivariateCdf for MixtureCdf<C> {
    fn cdf(&self, u: f64) -> f64 {
        self.eval(u)
    }

    fn quantile(&self, p: f64) -> Result<f64> {
        MixtureCdf::quantile(self, p)
    }

    fn is_degenerate(&self) -> bool {
        self.components.iter().all(|c| c.is_degenerate())
    }
}

/// Pointwise mean of the mixture's component CDFs at `u`.
pub fn mixture_cdf_eval<C: UnivariateCdf + PartialEq>(mix: &MixtureCdf<C>, u: f64) -> f64 {
    mix.eval(u)
}

pub fn mixture_quantile<C: UnivariateCdf + PartialEq>(mix: &MixtureCdf<C>, p: f64) -> Result<f64> {
    mix.quantile(p)
}

/// Settings for the Monte Carlo bagged posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BagConfig {
    pub replicates: usize,
    pub scheme: ResampleScheme,
    pub master_seed: u64,
    pub center: CenterPolicy,
    /// Compute replicates on the rayon pool. Results do not depend on this.
    pub parallel: bool,
}

impl Default for BagConfig {
    fn default() -> Self {
        BagConfig {
            replicates: DEFAULT_REPLICATES,
            scheme: ResampleScheme::ParametricBootstrap,
            master_seed: DEFAULT_SEED,
            center: CenterPolicy::SampleMean,
            parallel: true,
        }
    }
}

impl BagConfig {
    /// Ten replicates: a rough but already useful approximation.
    pub fn cheap() -> Self {
        BagConfig {
            replicates: 10,
            ..Default::default()
        }
    }

    pub fn with_replicates(self, replicates: usize) -> Self {
        BagConfig { replicates, ..self }
    }

    pub fn with_scheme(self, scheme: ResampleScheme) -> Self {
        BagConfig { scheme, ..self }
    }

    pub fn with_seed(self, master_seed: u64) -> Self {
        BagConfig {
            master_seed,
            ..self
        }
    }

    pub fn with_center(self, center: CenterPolicy) -> Self {
        BagConfig { center, ..self }
    }

    pub fn with_parallel(self, parallel: bool) -> Self {
        BagConfig { parallel, ..self }
    }
}

/// Posteriors of the `B` resampled datasets, in replicate order.
pub fn replicate_posteriors(
    model: &GaussianLocationModel,
    data: &Dataset,
    cfg: &BagConfig,
) -> Result<Vec<NormalDist>> {
    if cfg.replicates == 0 {
        return Err(Error::NoReplicates);
    }
    cfg.scheme.output_len(data.len())?;
    let center = cfg.center.center(model, data);
    let one = |b: usize| -> Result<NormalDist> {
        let seed = Seed::new(cfg.master_seed, b as u64);
        let star = resample(cfg.scheme, model, data, center, seed)?;
        Ok(model.posterior(&star))
    };
    if cfg.parallel {
        (0..cfg.replicates).into_par_iter().map(one).collect()
    } else {
        (0..cfg.replicates).map(one).collect()
    }
}

/// Monte Carlo bagged posterior: mixture of `B` replicate posterior CDFs.
pub fn bayesbag_mc(
    model: &GaussianLocationModel,
    data: &Dataset,
    cfg: &BagConfig,
) -> Result<MixtureCdf<NormalDist>> {
    MixtureCdf::new(replicate_posteriors(model, data, cfg)?)
}

/// Closed-form bagged posterior under the parametric bootstrap.
pub fn bayesbag_exact(
    model: &GaussianLocationModel,
    data: &Dataset,
    center: CenterPolicy,
) -> NormalDist {
    let law = bootstrap_mean_law(model, data, center.center(model, data));
    NormalDist::new(
        law.mean(),
        model.posterior_variance_for(data.len()) + law.variance(),
    )
    .expect("finite bagged posterior")
}

/// Numerical evaluation of the bagged CDF at `u` by Gauss–Hermite
/// quadrature over the bootstrap law of the posterior mean.
///
/// A 64-node and a 128-node rule are compared; disagreement above 1e-10 is
/// reported as non-convergence.
pub fn bayesbag_quadrature(
    model: &GaussianLocationModel,
    data: &Dataset,
    center: CenterPolicy,
    u: f64,
) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    let s = model.posterior_variance_for(data.len()).sqrt();
    let law = bootstrap_mean_law(model, data, center.center(model, data));
    if law.is_degenerate() {
        return Ok(std_normal_cdf((u - law.mean()) / s));
    }
    let integrand = |r: f64| std_normal_cdf((u - r) / s);
    let coarse = rule_64().expect_normal(law.mean(), law.variance(), integrand);
    let fine = rule_128().expect_normal(law.mean(), law.variance(), integrand);
    let residual = (fine - coarse).abs();
    if residual > 1e-10 || !fine.is_finite() {
        return Err(Error::QuadratureNonConvergence { residual });
    }
    Ok(fine.clamp(0.0, 1.0))
}

/// Central credible interval `(q((1-level)/2), q(1-(1-level)/2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantilePair {
    pub lo: f64,
    pub hi: f64,
}

impl QuantilePair {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Both ends rounded half away from zero to `decimals` places.
    pub fn rounded(&self, decimals: i32) -> QuantilePair {
        let scale = 10f64.powi(decimals);
        QuantilePair {
            lo: (self.lo * scale).round() / scale,
            hi: (self.hi * scale).round() / scale,
        }
    }

    pub fn contains(&self, other: &QuantilePair) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

pub fn credible_interval<D: UnivariateCdf + ?Sized>(dist: &D, level: f64) -> Result<QuantilePair> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::ProbabilityOutOfRange(level));
    }
    let tail = 0.5 * (1.0 - level);
    Ok(QuantilePair {
        lo: dist.quantile(tail)?,
        hi: dist.quantile(1.0 - tail)?,
    })
}
