use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scale must be positive, got gamma = {gamma}")]
    ScaleNotPositive { gamma: f64 },

    #[error("error SD must be nonnegative, got {sigma}")]
    NegativeErrorSd { sigma: f64 },

    #[error("degenerate measure: true-score and error variances are both zero")]
    DegenerateMeasure,

    #[error("reliability must lie in [0, 1], got {rho}")]
    ReliabilityOutOfRange { rho: f64 },

    #[error("reliability must be positive for delta, got {rho}")]
    ReliabilityNotPositive { rho: f64 },

    #[error("constant scores: standard deviation is zero")]
    ConstantScores,

    #[error("score sequences differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {min} scores, got {len}")]
    TooFewScores { len: usize, min: usize },

    #[error("SMD undefined for constant scores: pooled SD is zero")]
    ZeroPooledSd,

    #[error("variance collapse at t = {t}")]
    VarianceCollapse { t: f64 },

    #[error("power linkage requires positive scores, found {value}")]
    NonPositiveScore { value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
