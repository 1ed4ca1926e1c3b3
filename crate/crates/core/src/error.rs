use thiserror::Error;

/// Errors raised by the simulator and the analysis layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("process matrix entry ({row}, {col}) has imaginary part {imag:e}; map does not preserve Hermiticity")]
    NonRealEntry { row: usize, col: usize, imag: f64 },

    #[error("input operator is not Hermitian (deviation {0:e})")]
    NonHermitianInput(f64),

    #[error("negative decoherence rate {name} = {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("gate {0} is not known to the model")]
    UnknownGate(String),

    #[error("matrix is ill-conditioned (condition number {0:e} exceeds bound)")]
    IllConditioned(f64),

    #[error("reference table is singular or ill-conditioned (condition number {0:e})")]
    SingularReference(f64),

    #[error("process matrix is not trace preserving (first-row deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("calibration needs {expected} linearly independent elements, got {got}")]
    IncompleteCalibration { expected: usize, got: usize },

    #[error("wrong family kind: expected {expected}, got {got}")]
    WrongFamilyKind { expected: &'static str, got: &'static str },

    #[error("not enough data: {0}")]
    NotEnoughData(String),

    #[error("cannot parse gate `{token}`: {reason}")]
    GateSyntax { token: String, reason: String },

    #[error("table parse error at line {line}: {reason}")]
    TableParse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
