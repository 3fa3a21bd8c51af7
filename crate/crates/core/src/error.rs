use thiserror::Error;

/// Errors produced by the bagging library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("non-finite input")]
    NonFinite,
    #[error("degenerate density")]
    DegenerateDensity,
    #[error("probability out of range: {0}")]
    ProbabilityOutOfRange(f64),
    #[error("subsample larger than data (m = {m}, n = {n})")]
    SubsampleTooLarge { m: usize, n: usize },
    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("replicate count must be at least 1")]
    NoReplicates,
    #[error("quadrature did not converge (residual {residual:e})")]
    QuadratureNonConvergence { residual: f64 },
    #[error("closed-form bagging requires the parametric bootstrap")]
    ExactRequiresParametric,
    #[error("grid needs at least {0} points")]
    GridTooSmall(usize),
    #[error("all mixture components are degenerate")]
    DegenerateMixture,
}

impl Error {
    /// True for errors caused by bad user input rather than a numerical failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::QuadratureNonConvergence { .. } | Error::DegenerateMixture
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
