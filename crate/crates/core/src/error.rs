use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("index out of range: {what} {index} (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },
    /// Mobiles (0-based) that no base station can serve.
    #[error("infeasible matrix: mobiles {mobiles:?} have no finite power entry")]
    Infeasible { mobiles: Vec<usize> },
    #[error("invalid assignment: mobile {mobile} cannot be served by bs {bs}")]
    InvalidAssignment { mobile: usize, bs: usize },
    #[error("invalid pair: p[{mobile}][{bs}] is infinite")]
    InvalidPair { mobile: usize, bs: usize },
    #[error("search needs {states} states, budget is {budget}")]
    BudgetExceeded { states: u128, budget: u64 },
    #[error("mobile {0} is not listed by any received broadcast")]
    UncoveredMobile(usize),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal logic error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, MapError>;
