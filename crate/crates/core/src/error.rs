use thiserror::Error;

/// Errors produced by the selection library and the benchmark harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A tunable parameter (epsilon, alpha, ...) is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A caller broke an operation's precondition (k out of range, empty input, ...).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// The brute-force oracle refused to materialize a tensor this large.
    #[error("brute force refused: {cells} tensor cells exceeds guard of {guard}")]
    GuardExceeded { cells: u128, guard: u128 },

    /// A score was NaN or infinite.
    #[error("non-finite score: {0}")]
    NonFinite(f64),

    /// Input file could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),

    /// A selector disagreed with the oracle, or an instrumented invariant failed.
    #[error("validation failed: {0}")]
    Validation(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
