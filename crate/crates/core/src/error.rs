//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("target {target} is not bracketed by [{lo}, {hi}] (image [{image_lo}, {image_hi}])")]
    NoBracket {
        target: f64,
        lo: f64,
        hi: f64,
        image_lo: f64,
        image_hi: f64,
    },

    #[error("quadrature error: {0}")]
    Quadrature(String),

    #[error("overflow evaluating generator at entry #{index} (a = {entry})")]
    Overflow { index: usize, entry: f64 },

    #[error("unsupported generator: {0}")]
    UnsupportedGenerator(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("construction infeasible: {0}")]
    ConstructionInfeasible(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by bad input rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Domain(_)
                | Error::HypothesisViolated(_)
                | Error::ConstructionInfeasible(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
