use thiserror::Error;

/// Errors raised by the library. Every variant except [`SpinError::Internal`]
/// corresponds to a violated precondition of some operation.
#[derive(Debug, Error)]
pub enum SpinError {
    #[error("conductor mismatch: {0} vs {1}")]
    ConductorMismatch(u32, u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{what} requires odd field order, got q = {q}")]
    EvenOrder { what: &'static str, q: u64 },

    #[error("paley type {kind} requires q = {residue} mod 4, got q = {q}")]
    WrongResidue { kind: &'static str, residue: u64, q: u64 },

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("hadamard validation failed: {0}")]
    ValidationFailed(String),

    #[error("dimension {dim} exceeds dense cap {cap}; use the matrix-free path")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("diagram width inconsistency: {0}")]
    Width(String),

    #[error("spin count mismatch: expected q = {expected}, got q = {got}")]
    QMismatch { expected: usize, got: usize },

    #[error("box level mismatch: expected level {expected}, got level {got}")]
    LevelMismatch { expected: usize, got: usize },

    #[error("matrix is not hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("exact ring mismatch: {0}")]
    MixedRings(String),

    #[error("exact entries unavailable: {0}")]
    NoExactForm(String),

    #[error("graph input: {0}")]
    Graph(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl SpinError {
    /// True for errors caused by bad input rather than a bug or I/O failure.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, SpinError::Internal(_) | SpinError::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, SpinError>;
