//! Stability diagnostics: bootstrapped CDF bands and raw-vs-bagged reports.
//!
//! Distances are sup-norms over the evaluation grid, not over the real line.

use rayon::prelude::*;

use crate::bagging::{
    bayesbag_exact, credible_interval, replicate_posteriors, BagConfig, MixtureCdf, QuantilePair,
    UnivariateCdf,
};
use crate::error::{Error, Result};
use crate::model::{Dataset, GaussianLocationModel};
use crate::normal::NormalDist;
use crate::resample::ResampleScheme;

/// Equally spaced grid centered on the posterior mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    /// Half-width of the grid in units of the bagged standard deviation.
    pub half_width_sds: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 401,
            half_width_sds: 6.0,
        }
    }
}

impl GridSpec {
    pub fn with_points(self, points: usize) -> Self {
        GridSpec { points, ..self }
    }

    /// With an odd number of points the middle point is exactly `center`.
    pub fn grid(&self, center: f64, sd: f64) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::GridTooSmall(2));
        }
        if !self.half_width_sds.is_finite() || self.half_width_sds <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "half_width_sds",
                value: self.half_width_sds,
            });
        }
        let half = self.half_width_sds * sd;
        let mid = (self.points - 1) as f64 / 2.0;
        let step = half / mid;
        Ok((0..self.points)
            .map(|i| center + (i as f64 - mid) * step)
            .collect())
    }
}

/// Pointwise envelope across replicate curves.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Envelope {
    #[default]
    MinMax,
    /// Empirical pointwise quantiles, e.g. `(0.025, 0.975)`.
    Quantiles { lo: f64, hi: f64 },
}

/// Replicate posterior CDFs evaluated on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfBand {
    pub grid: Vec<f64>,
    /// One row per replicate, one column per grid point.
    pub per_replicate: Vec<Vec<f64>>,
    pub pointwise_lo: Vec<f64>,
    pub pointwise_hi: Vec<f64>,
    /// The bagged CDF on the grid.
    pub mean_curve: Vec<f64>,
    /// Raw posterior CDF on the grid.
    pub posterior_curve: Vec<f64>,
}

impl CdfBand {
    pub fn replicates(&self) -> usize {
        self.per_replicate.len()
    }

    /// `pointwise_hi - pointwise_lo` at the grid point closest to `u`.
    pub fn width_at(&self, u: f64) -> f64 {
        let j = self
            .grid
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - u).abs().total_cmp(&(b.1 - u).abs()))
            .map(|(j, _)| j)
            .expect("non-empty grid");
        self.pointwise_hi[j] - self.pointwise_lo[j]
    }
}

/// Linear-interpolation quantile of an already sorted slice.
fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = p * (sorted.len() - 1) as f64;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    match sorted.get(i + 1) {
        Some(next) => sorted[i] + frac * (next - sorted[i]),
        None => sorted[i],
    }
}

/// Standard deviation of an equal-weight normal mixture.
fn mixture_sd(components: &[NormalDist]) -> f64 {
    let b = components.len() as f64;
    let mean = components.iter().map(|c| c.mean()).sum::<f64>() / b;
    let var = components
        .iter()
        .map(|c| c.variance() + (c.mean() - mean).powi(2))
        .sum::<f64>()
        / b;
    var.sqrt()
}

pub fn build_band(
    model: &GaussianLocationModel,
    data: &Dataset,
    cfg: &BagConfig,
    grid_spec: &GridSpec,
    envelope: Envelope,
) -> Result<CdfBand> {
    if let Envelope::Quantiles { lo, hi } = envelope {
        if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
            return Err(Error::ProbabilityOutOfRange(if lo > hi { hi } else { lo }));
        }
    }
    let post = model.posterior(data);
    let mix = MixtureCdf::new(replicate_posteriors(model, data, cfg)?)?;
    let grid = grid_spec.grid(post.mean(), mixture_sd(mix.components()))?;

    let row = |c: &NormalDist| grid.iter().map(|&u| c.cdf(u)).collect::<Vec<f64>>();
    let per_replicate: Vec<Vec<f64>> = if cfg.parallel {
        mix.components().par_iter().map(row).collect()
    } else {
        mix.components().iter().map(row).collect()
    };
    let mean_curve: Vec<f64> = grid.iter().map(|&u| mix.eval(u)).collect();
    let posterior_curve: Vec<f64> = grid.iter().map(|&u| post.cdf(u)).collect();

    let mut pointwise_lo = Vec::with_capacity(grid.len());
    let mut pointwise_hi = Vec::with_capacity(grid.len());
    let mut column = Vec::with_capacity(per_replicate.len());
    for (j, &mean) in mean_curve.iter().enumerate() {
        column.clear();
        column.extend(per_replicate.iter().map(|r| r[j]));
        column.sort_by(f64::total_cmp);
        let (lo, hi) = match envelope {
            Envelope::MinMax => (column[0], column[column.len() - 1]),
            Envelope::Quantiles { lo, hi } => {
                (sorted_quantile(&column, lo), sorted_quantile(&column, hi))
            }
        };
        // the envelope always contains the mean curve
        pointwise_lo.push(lo.min(mean));
        pointwise_hi.push(hi.max(mean));
    }

    Ok(CdfBand {
        grid,
        per_replicate,
        pointwise_lo,
        pointwise_hi,
        mean_curve,
        posterior_curve,
    })
}

/// How the bagged posterior in a report is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    /// Closed form; parametric bootstrap only.
    #[default]
    Exact,
    MonteCarlo,
}

/// One grid point of the raw and bagged CDFs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub u: f64,
    pub posterior: f64,
    pub bagged: f64,
}

/// Raw posterior versus bagged posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct BagReport {
    pub n: usize,
    pub level: f64,
    pub scheme: ResampleScheme,
    pub evaluation: Evaluation,
    pub replicates: usize,
    pub posterior: NormalDist,
    pub posterior_interval: QuantilePair,
    pub bagged_interval: QuantilePair,
    pub widening_ratio: f64,
    /// Grid sup-distance between the raw and bagged CDFs.
    pub ks_distance: f64,
    /// Every replicate reproduced the raw posterior.
    pub degenerate_resampling: bool,
    pub curve: Vec<CurvePoint>,
}

pub fn make_report(
    model: &GaussianLocationModel,
    data: &Dataset,
    cfg: &BagConfig,
    evaluation: Evaluation,
    level: f64,
    grid_spec: &GridSpec,
) -> Result<BagReport> {
    let post = model.posterior(data);
    let posterior_interval = credible_interval(&post, level)?;

    let (bagged_interval, widening_ratio, degenerate, bag_sd, bag_cdf): (
        QuantilePair,
        f64,
        bool,
        f64,
        Box<dyn UnivariateCdf>,
    ) = match evaluation {
        Evaluation::Exact => {
            if cfg.scheme != ResampleScheme::ParametricBootstrap {
                return Err(Error::ExactRequiresParametric);
            }
            let bag = bayesbag_exact(model, data, cfg.center);
            let interval = credible_interval(&bag, level)?;
            let ratio = (bag.variance() / post.variance()).sqrt();
            (interval, ratio, false, bag.sd(), Box::new(bag))
        }
        Evaluation::MonteCarlo => {
            let mix = MixtureCdf::new(replicate_posteriors(model, data, cfg)?)?;
            let interval = credible_interval(&mix, level)?;
            let degenerate = mix.components().iter().all(|c| *c == post);
            let ratio = interval.width() / posterior_interval.width();
            let sd = mixture_sd(mix.components());
            (interval, ratio, degenerate, sd, Box::new(mix))
        }
    };

    let grid = grid_spec.grid(post.mean(), bag_sd)?;
    let curve: Vec<CurvePoint> = grid
        .iter()
        .map(|&u| CurvePoint {
            u,
            posterior: post.cdf(u),
            bagged: bag_cdf.cdf(u),
        })
        .collect();
    let ks_distance = curve
        .iter()
        .map(|c| (c.posterior - c.bagged).abs())
        .fold(0.0, f64::max);

    Ok(BagReport {
        n: data.len(),
        level,
        scheme: cfg.scheme,
        evaluation,
        replicates: match evaluation {
            Evaluation::Exact => 0,
            Evaluation::MonteCarlo => cfg.replicates,
        },
        posterior: post,
        posterior_interval,
        bagged_interval,
        widening_ratio,
        ks_distance,
        degenerate_resampling: degenerate,
        curve,
    })
}

/// Grid sup-distance between two CDFs.
pub fn sup_distance<A, B>(a: &A, b: &B, grid: &[f64]) -> f64
where
    A: UnivariateCdf + ?Sized,
    B: UnivariateCdf + ?Sized,
{
    grid.iter()
        .map(|&u| (a.cdf(u) - b.cdf(u)).abs())
        .fold(0.0, f64::max)
}
