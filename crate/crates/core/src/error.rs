use thiserror::Error;

use crate::numerics::Mode;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode mismatch: cannot combine {left:?} and {right:?} values")]
    ModeMismatch { left: Mode, right: Mode },

    #[error("division by zero")]
    DivisionByZero,

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: String,
        domain: &'static str,
    },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("invalid growth envelope: {0}")]
    InvalidEnvelope(String),

    #[error("cannot certify truncation: {0}")]
    CannotCertify(String),

    #[error("quadrature did not converge on [{lo}, {hi}] within {budget} subintervals (error estimate {estimate:e})")]
    Quadrature {
        lo: f64,
        hi: f64,
        budget: usize,
        estimate: f64,
    },

    #[error("{0} is not supported in exact mode")]
    ExactUnsupported(String),

    #[error("sequence too short: need {needed} values, have {have}")]
    SequenceTooShort { needed: usize, have: usize },

    #[error("sequence nodes must be nonnegative integers, got {0}")]
    NonIntegerNode(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
