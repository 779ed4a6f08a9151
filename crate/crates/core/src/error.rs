use std::path::PathBuf;

use thiserror::Error;

/// Configuration diagnostics. Each variant is a distinct class so callers can
/// tell a typo from a physically meaningless value.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key(s): {}", .0.join(", "))]
    MissingKeys(Vec<String>),
    #[error("unit error: {0}")]
    Unit(String),
    #[error("non-physical value: {0}")]
    NonPhysical(String),
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error("referenced file `{}` does not exist", .0.display())]
    MissingFile(PathBuf),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("R = {r} bohr is outside the tabulated range [{min}, {max}]")]
    Domain { r: f64, min: f64, max: f64 },

    #[error("unbound request: {requested} states requested but only {available} bound state(s) exist")]
    Unbound { requested: usize, available: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("propagation failed at step {step}: {reason}")]
    Propagation { step: usize, reason: String },

    #[error("oracle size guard: {n} grid points exceeds the limit of {limit}")]
    OracleSize { n: usize, limit: usize },

    #[error("run is boundary-contaminated: edge probability {probability:.3e} at t = {t_ps:.4} ps")]
    BoundaryContamination { t_ps: f64, probability: f64 },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } => 4,
            Error::BoundaryContamination { .. } => 5,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
