//! One error type for the whole crate.

use crate::uniformize::PartialDecomposition;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: u32, right: u32 },

    #[error("ambient dimension {0} outside supported range 0..=24")]
    DimensionRange(u32),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("budget exceeded: {what} needs {needed} but budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("conditioning event has zero mass: {0}")]
    ZeroMassEvent(String),

    #[error(
        "incomplete decomposition: cap of {cap} split rounds reached with \
         {covered} of {total} pairs covered"
    )]
    IncompleteDecomposition {
        cap: u32,
        covered: u64,
        total: u64,
        partial: Box<PartialDecomposition>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn budget(what: impl Into<String>, needed: u128, budget: u128) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            needed,
            budget,
        }
    }
}
