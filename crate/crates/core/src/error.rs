use thiserror::Error;

/// Errors produced by the numerical operations in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not hermitian within tolerance (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary within tolerance (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("operator norm {0} exceeds the contraction bound")]
    NormExceedsOne(f64),
    #[error("coefficient tuple is linearly dependent")]
    LinearlyDependent,
    #[error("outside the map domain: {0}")]
    DomainViolation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("dimension budget exceeded: {0}")]
    Budget(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
