use thiserror::Error;

use crate::roots::RootSet;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error in polynomial `{text}`: {reason}")]
    Syntax { text: String, reason: String },

    #[error("non-integer coefficient `{0}`")]
    NonIntegerCoefficient(String),

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("{what} = {requested} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: u64,
        cap: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root selection failed: {0}")]
    RootSelection(String),

    /// Root refinement ran out of rounds; the partial enclosures are attached.
    #[error("precision {target:e} not reached after {rounds} refinement rounds (achieved {achieved:e})")]
    PrecisionBudget {
        target: f64,
        achieved: f64,
        rounds: usize,
        partial: Box<RootSet>,
    },

    #[error("parameter refused: {0}")]
    Refused(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("undecided: {0}")]
    Undecided(String),

    #[error("codec: {0}")]
    Codec(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by a size cap rather than by bad input or a bug.
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. } | Error::PrecisionBudget { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
