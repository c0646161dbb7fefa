use thiserror::Error;

/// Errors raised by grid construction, evaluation and the optimizer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point |x| = {norm} is the degenerate origin of the convolution")]
    DegenerateSlice { norm: f64 },

    #[error("spheres do not intersect: |x| = {norm} > 2")]
    EmptyIntersection { norm: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("argument {value} outside [-1, 1]")]
    OutOfDomain { value: f64 },

    #[error("grid exactness degree {available} is below the required {required}")]
    InsufficientExactness { required: usize, available: usize },

    #[error("degree mismatch: expected {expected}, got {actual}")]
    DegreeMismatch { expected: usize, actual: usize },

    #[error("the zero function has no defined ratio")]
    ZeroFunction,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
