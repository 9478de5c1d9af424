use thiserror::Error;

/// Errors raised by the precoding, analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A precoder row is zero, so the DAC input of that antenna has no variance.
    #[error("precoder row {row} is zero; Bussgang normalization is undefined")]
    DegenerateRow { row: usize },

    #[error("correlation component {value} lies outside [-1, 1]")]
    NumericalDomain { value: f64 },

    #[error("non-finite value in quantizer input at index {index}")]
    NonFinite { index: usize },

    #[error("channel matrix is rank deficient")]
    SingularChannel,

    #[error("precoder is not full column rank (singular value ratio {ratio:e})")]
    RankDeficientPrecoder { ratio: f64 },

    #[error("least-squares system for the adapted diagonal is singular")]
    DegenerateGeometry,

    #[error("exhaustive search over {m} antennas exceeds the limit of {max}")]
    Capacity { m: usize, max: usize },

    #[error("experiment has no trials")]
    EmptyCurve,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
