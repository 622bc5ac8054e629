use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("information formulas need unit stationary variance, got sigma^2/(2 lambda) = {0}")]
    NotNormalized(f64),

    #[error("dense covariance is limited to {cap} observation pairs, got {n}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("covariance is singular: spacing {index} gives 1 - exp(-2 lambda d) = 0")]
    SingularCovariance { index: usize },

    #[error("omega = 0: trend information keeps increasing with the spacing, no finite optimal design")]
    FrequencyZero,

    #[error("{0} is outside the principal Lambert W domain (-1/e, inf)")]
    LambertDomain(f64),

    #[error("no sign change of the bracketing function on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("no convergence after {iterations} iterations: {reason}")]
    NonConvergence { iterations: usize, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
