use thiserror::Error;

/// Errors raised by estimators, null models, tests and samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RankError {
    #[error("insufficient data: need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("sequences differ in length: x1 has {x1}, x2 has {x2}")]
    LengthMismatch { x1: usize, x2: usize },

    #[error("non-finite value at index {index} of {column}")]
    NonFinite { column: &'static str, index: usize },

    #[error("second coordinate is constant; the coefficient is undefined")]
    DegenerateMarginal,

    #[error("ties not supported: {0}")]
    TiesUnsupported(&'static str),

    #[error("brute-force evaluation limited to n <= {max}, got {actual}")]
    TooLargeForBruteForce { max: usize, actual: usize },

    #[error("Simpson grid needs an even number of intervals >= 4, got {0}")]
    InvalidGrid(usize),

    #[error("invalid bandwidth {0}")]
    InvalidBandwidth(f64),

    #[error("truncation must be at least {min}, got {actual}")]
    InvalidTruncation { min: usize, actual: usize },

    #[error("draw count must be at least {min}, got {actual}")]
    InvalidDrawCount { min: usize, actual: usize },

    #[error("significance level must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("null model kind does not match the coefficient: {0}")]
    KindMismatch(String),

    #[error("null model was built for different settings: {0}")]
    NullMismatch(String),

    #[error("dependence strength {0} outside the family's admissible range")]
    InvalidDelta(f64),

    #[error("density ratio exceeds the envelope: acceptance ratio {ratio} > 1 at ({x1}, {x2})")]
    EnvelopeViolation { ratio: f64, x1: f64, x2: f64 },

    #[error("unknown preset '{0}' (expected one of a, b, c, d, e, f)")]
    UnknownPreset(String),

    #[error("replicate {index}: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<RankError>,
    },

    #[error("bank file: {0}")]
    BankFormat(String),

    #[error("configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, RankError>;
