use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("ambient dimension must be at least 1")]
    ZeroDimension,

    #[error("p^n = {p}^{n} does not fit in 64 bits")]
    AmbientTooLarge { p: u32, n: usize },

    #[error("ambient mismatch: expected F_{expected_p}^{expected_n}, got F_{found_p}^{found_n}")]
    AmbientMismatch {
        expected_p: u32,
        expected_n: usize,
        found_p: u32,
        found_n: usize,
    },

    #[error("vector has {found} coordinates, ambient dimension is {expected}")]
    WrongLength { expected: usize, found: usize },

    #[error("coordinate {value} out of range for p = {p}")]
    CoordinateOutOfRange { value: u64, p: u32 },

    #[error("point code {code} out of range [0, {limit})")]
    CodeOutOfRange { code: u64, limit: u64 },

    #[error("dimension k = {k} out of range for n = {n}")]
    DimensionOutOfRange { k: usize, n: usize },

    #[error("exact integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("rows do not form a reduced echelon basis of full rank")]
    NotCanonical,

    #[error("projection needs a proper non-trivial subspace, got dimension {dim} in F_p^{n}")]
    TrivialSubspace { dim: usize, n: usize },

    #[error("the zero vector does not span a line")]
    ZeroVector,

    #[error("{what} budget exceeded: {needed} > {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("set size {size} out of range [0, {limit}]")]
    SizeOutOfRange { size: u64, limit: u64 },

    #[error("operation needs a non-empty point set")]
    EmptySet,

    #[error("family members must all have dimension {expected}, found {found}")]
    MixedDimensions { expected: usize, found: usize },

    #[error("codimension m = {m} must satisfy 1 <= m <= n - 1 (n = {n})")]
    CodimensionOutOfRange { m: usize, n: usize },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{}line {line}: {message}", path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        LabError::Parse {
            path: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn with_path(self, path: &std::path::Path) -> Self {
        match self {
            LabError::Parse { line, message, .. } => LabError::Parse {
                path: Some(path.to_path_buf()),
                line,
                message,
            },
            other => other,
        }
    }

    /// True for errors raised by a budget guard.
    pub fn is_budget(&self) -> bool {
        matches!(self, LabError::BudgetExceeded { .. })
    }
}
