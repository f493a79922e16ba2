use thiserror::Error;

/// Errors raised by the sampling and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("region is unbounded")]
    UnboundedRegion,

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("point lies outside the indexed region")]
    OutsideIndex,

    #[error("query radius {radius} exceeds cell size {cell}")]
    RadiusExceedsCell { radius: f64, cell: f64 },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid activity: {0}")]
    InvalidActivity(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("block update at step {step} rejected {attempts} consecutive proposals")]
    RejectionLimit { step: u64, attempts: u64 },

    #[error("walk weights underflowed to zero for every sample at k = {k}")]
    WeightUnderflow { k: usize },

    #[error("tolerance {tolerance:e} unreachable with series order <= {max_order}")]
    OracleTolerance { tolerance: f64, max_order: usize },

    #[error("estimator produced a zero probability: {0}")]
    ZeroProbability(String),

    #[error("degenerate regression: {0}")]
    DegenerateFit(String),
}

impl Error {
    pub fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
