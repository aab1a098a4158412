use thiserror::Error;

use crate::lattice::LatticePoint;

/// Errors raised by the library.
///
/// Every failure is one of three kinds (see [`Error::kind`]): a violated
/// precondition, an exhausted budget, or an arithmetic overflow.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("budget exceeded: {what} needs {required}, limit is {limit}")]
    Budget {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("expected exactly two integral images of {point} on the sphere of norm {d}, found {found}")]
    StepCount {
        point: LatticePoint,
        d: u64,
        found: usize,
    },

    #[error("quaternion has zero norm")]
    ZeroNorm,

    #[error("form ({a}, {b}, {c}) is not positive definite")]
    Indefinite { a: i64, b: i64, c: i64 },

    #[error("form ({a}, {b}, {c}) is degenerate")]
    Degenerate { a: i64, b: i64, c: i64 },

    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),

    #[error("form ({a}, {b}, {c}) is not a reduced form of discriminant {disc}")]
    NotInGroup { a: i64, b: i64, c: i64, disc: i64 },

    #[error("prime {p} is inert for discriminant {disc}")]
    InertPrime { p: u64, disc: i64 },

    #[error("point {point} has norm {found}, expected {expected}")]
    NormMismatch {
        point: LatticePoint,
        expected: u64,
        found: u128,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("value out of range: {0}")]
    Range(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Precondition,
    Budget,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Budget { .. } => ErrorKind::Budget,
            _ => ErrorKind::Precondition,
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
