use thiserror::Error;

/// Errors raised by the engine.
///
/// The variants fall into two families. Input errors (`DimensionMismatch`,
/// `ImageOutOfRange`, `IndexOutOfRange`, `InvalidInput`, `Hypothesis`) mean the
/// caller handed over something malformed or outside an operation's
/// preconditions. `Invariant` means a combinatorial statement the engine
/// certifies turned out false on a concrete instance; it should never fire.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: map with target {dst} cannot follow map with source {src}")]
    DimensionMismatch { src: usize, dst: usize },

    #[error("image entry {value} at position {index} is out of range for a target of size {dst}")]
    ImageOutOfRange { index: usize, value: usize, dst: usize },

    #[error("index {index} out of range for a simplex of degree {degree}")]
    IndexOutOfRange { index: usize, degree: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for failures of a certified combinatorial statement, as opposed to bad input.
    pub fn is_invariant_failure(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! invariant {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Invariant(format!($($arg)+)));
        }
    };
}
pub(crate) use invariant;
