use thiserror::Error;

/// Errors raised while validating inputs or running a computation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("entries must be finite")]
    NonFinite,

    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("observable does not square to the identity (residual {residual:e})")]
    NotInvolution { residual: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("setting index {index} out of range (only {count} settings)")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("expected {expected} parameters, found {found}")]
    ParameterCount { expected: usize, found: usize },

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("invalid Bloch vector: {0}")]
    Bloch(String),

    #[error("invalid probability table: {0}")]
    Table(String),

    #[error(
        "backward signaling for Alice outcome {r:+} under setting {k} (deviation {deviation:e})"
    )]
    BackwardSignaling { r: i8, k: usize, deviation: f64 },

    #[error("vertex budget exceeded: m + n = {settings} > {max}")]
    BudgetExceeded { settings: usize, max: usize },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
