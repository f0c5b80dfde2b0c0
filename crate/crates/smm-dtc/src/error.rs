//! Error type shared across the crate, with stable CLI exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spin: {0}")]
    InvalidSpin(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Dense storage cap: chains are rejected before any allocation is attempted.
    #[error("chain dimension {dim} exceeds the dense-matrix cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Integration invariants (trace, hermiticity) drifted past their bound.
    #[error("numerical drift: {0}")]
    Drift(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("analysis: {0}")]
    Analysis(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse: {0}")]
    TomlParse(#[from] toml::de::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code contract for the CLI: 2 config/validation, 3 dimension cap,
    /// 4 numerical drift, 5 i/o, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::TomlParse(_)
            | Error::InvalidSpin(_)
            | Error::Unsupported(_) => 2,
            Error::DimensionCap { .. } => 3,
            Error::Drift(_) => 4,
            Error::Io(_) | Error::Json(_) => 5,
            _ => 1,
        }
    }
}
