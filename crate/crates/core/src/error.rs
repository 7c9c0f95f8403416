use thiserror::Error;

use crate::density::DensityResult;

/// Errors raised by the arithmetic and number-theoretic operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a and q must be coprime (got {a}/{q})")]
    NotCoprime { a: String, q: String },
    #[error("modulus must be positive (got {0})")]
    NonPositiveModulus(String),
    #[error("square root of a negative number ({0})")]
    NegativeRadicand(String),
    #[error("argument must be at least 1")]
    ZeroArgument,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("expected 1 <= a < q (got {a}/{q})")]
    OutOfRange { a: String, q: String },
    #[error("approximation must differ from the target")]
    Coincident,
    #[error("malformed fraction {0:?}")]
    MalformedFraction(String),
    #[error("malformed continued fraction {0:?}")]
    MalformedContinuedFraction(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("search budget exhausted at m = {}", .0.m_used)]
    BudgetExceeded(Box<DensityResult>),
}

pub type Result<T> = std::result::Result<T, Error>;
