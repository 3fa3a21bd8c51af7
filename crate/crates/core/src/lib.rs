//! Bootstrap-aggregated ("bagged") Bayesian posteriors.
//!
//! The bagged posterior averages the posterior CDF over perturbed datasets,
//! `F_bag(·|D) = E*[F(·|D*)]`, where `D*` is a bootstrap sample or subsample
//! of `D`. The conjugate Gaussian location model with known noise variance is
//! solved exactly; the Monte Carlo path works with any evaluable CDF through
//! [`MixtureCdf`].

pub mod bagging;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod normal;
pub mod quadrature;
pub mod resample;

pub use bagging::{
    bayesbag_exact, bayesbag_mc, bayesbag_quadrature, credible_interval, mixture_cdf_eval,
    mixture_quantile, replicate_posteriors, BagConfig, MixtureCdf, QuantilePair, UnivariateCdf,
    DEFAULT_REPLICATES, DEFAULT_SEED,
};
pub use diagnostics::{
    build_band, make_report, BagReport, CdfBand, Envelope, Evaluation, GridSpec,
};
pub use error::{Error, Result};
pub use model::{posterior, Dataset, GaussianLocationModel};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile, NormalDist};
pub use resample::{
    bootstrap_mean_law, map_point_estimate, point_estimate, resample, simulate, CenterPolicy,
    PointEstimate, ResampleScheme, Seed,
};
