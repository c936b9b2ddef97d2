use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QracError {
    #[error("invalid dimension {0}: need d >= 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symbol {symbol} out of range for d = {d}")]
    OutOfRange { symbol: usize, d: usize },

    #[error("instance too large: {0}")]
    InstanceTooLarge(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("degenerate normalization: N^2 = {0:e}")]
    DegenerateNormalization(f64),

    #[error("no feasible parameters for d = {d}, a = {a}")]
    Infeasible { d: usize, a: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("expected {expected} records, found {found}")]
    RecordCount { expected: usize, found: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl QracError {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            QracError::Numerical(_) | QracError::Infeasible { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, QracError>;
