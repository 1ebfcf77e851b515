use thiserror::Error;

use crate::nonlinear::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group descriptor {descriptor:?}: {reason}")]
    GroupParse { descriptor: String, reason: String },

    #[error("cyclic modulus must be at least 1")]
    ZeroModulus,

    #[error("group must have at least one cyclic factor")]
    EmptyGroup,

    #[error("shape mismatch: expected {expected} coordinates, got {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("coordinate {index} = {value} out of range for modulus {modulus}")]
    ResidueOutOfRange {
        index: usize,
        value: usize,
        modulus: usize,
    },

    #[error("operands live on different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },

    #[error("expected {expected} values for the group, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight {weight} is not defined on group {group}: {reason}")]
    WeightUnsupported {
        weight: String,
        group: String,
        reason: String,
    },

    #[error("not in H^(c,inf): coefficient {index} is {magnitude:e} where the multiplier is unrepresentable (log m = {log_multiplier})")]
    NotInDomain {
        index: usize,
        magnitude: f64,
        log_multiplier: f64,
    },

    #[error("signal is not real-valued: |Im| = {magnitude:e} at index {index}")]
    NonReal { index: usize, magnitude: f64 },

    #[error("iteration diverged after {} iterations", .0.iterations)]
    Diverged(Box<SolveReport>),

    #[error("iteration budget exhausted after {} iterations (last step {:e})", .0.iterations, .0.residual_history.last().copied().unwrap_or(f64::NAN))]
    MaxIterations(Box<SolveReport>),

    #[error("malformed signal file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
