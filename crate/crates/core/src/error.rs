use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised across the crate.
///
/// Variants split into two families: input/validation problems (the caller
/// handed us something malformed) and numerical failures (the input was
/// well-formed but a computation could not be completed reliably). The CLI
/// maps them to exit codes 1 and 2 respectively via [`Error::is_numerical`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {requested} out of range (available: {available})")]
    OutOfRange { requested: usize, available: usize },

    #[error("{what} is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { what: String, min_eigenvalue: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("ill-conditioned normalization at step {step} (min eigenvalue {min_eigenvalue:e})")]
    IllConditioned { step: usize, min_eigenvalue: f64 },

    #[error("z = {z} lies in the wrong half-plane: {requirement}")]
    HalfPlane { z: Complex64, requirement: &'static str },

    #[error("pole at z = {0}")]
    Pole(Complex64),

    #[error("refused: moment problem is not completely indeterminate ({0})")]
    NotCompletelyIndeterminate(String),

    #[error("classification unavailable: {0}")]
    ClassificationUnavailable(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl Error {
    /// True for failures of the numerics (or refusals on a valid input), false
    /// for malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::Singular(_)
                | Error::IllConditioned { .. }
                | Error::Pole(_)
                | Error::NotCompletelyIndeterminate(_)
                | Error::ClassificationUnavailable(_)
                | Error::NumericalFailure(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
