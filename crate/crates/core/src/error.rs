use thiserror::Error;

/// Errors raised by the localization and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero distance between sensor {sensor} and location ({x}, {y})")]
    ZeroDistance { sensor: usize, x: f64, y: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("coherence is undefined for a zero vector")]
    ZeroVector,

    #[error("column {0} of the measurement matrix is zero")]
    ZeroColumn(usize),

    #[error("restricted columns are rank deficient; newest offending index {newest}")]
    DegenerateSupport { newest: usize },

    #[error("band exclusion leaves no admissible column")]
    NoAdmissibleColumn,

    #[error("noiseless signature at ({x}, {y}) is zero")]
    ZeroSignature { x: f64, y: f64 },

    #[error("candidate locations produce indistinguishable signatures")]
    Degenerate,

    #[error("quadrature did not reach tolerance {tolerance:e} within {evaluations} evaluations (error estimate {estimate:e})")]
    QuadratureFailure {
        tolerance: f64,
        evaluations: usize,
        estimate: f64,
    },

    #[error("sample stream is empty")]
    EmptyStream,

    #[error("RSS value {value} at position {index} is not positive")]
    NonpositiveRss { index: usize, value: f64 },

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("all distances are equal; exponent is not identifiable")]
    CollinearDegenerate,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
