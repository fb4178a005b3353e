//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by simulation, estimation, and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand dimensions (qubit counts, vector lengths) do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A dense Liouville-space operation was requested for too many qubits.
    #[error("{n} qubits exceeds the dense-representation cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },

    /// A numeric or structural parameter is out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A channel failed complete-positivity / trace-preservation validation.
    #[error("channel is not CPTP: {0}")]
    NotCptp(String),

    /// A probe operator is incompatible with the shadow's gate set or irrep.
    #[error("probe incompatible with shadow: {0}")]
    ProbeMismatch(String),

    /// A configuration file is malformed or inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// A shadow file violates the record format.
    #[error("shadow file error at line {line}: {msg}")]
    ShadowFormat { line: usize, msg: String },

    /// Estimation could not proceed (empty data, degenerate fit, ...).
    #[error("estimation error: {0}")]
    Estimation(String),

    /// Requested operation is outside the supported domain.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
