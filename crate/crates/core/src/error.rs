use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("channel synthesis failed: {0}")]
    SynthesisFailed(String),
    #[error("observable construction failed: {0}")]
    ConstructionFailed(String),
    #[error("oracle hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("angle sum is {found}, expected {expected}")]
    AngleSumMismatch { expected: String, found: String },
    #[error("tensor power too large: {0} factors (at most 3 supported)")]
    DimensionGuard(usize),
    #[error("cannot parse angle {0:?}: expected p/q as a fraction of pi")]
    AngleParse(String),
}
