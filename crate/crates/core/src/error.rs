use thiserror::Error;

/// Errors reported by the library. Every variant is a refusal, never a guess.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("coefficient is zero")]
    ZeroCoefficient,

    #[error("degenerate surface: ad - bc = 0")]
    DegenerateDeterminant,

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("factorization of {0} exceeded its iteration budget")]
    FactorizationBudget(u128),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("work estimate {estimated} exceeds budget {budget}")]
    BudgetExceeded { estimated: u128, budget: u128 },

    #[error("series did not stabilise: {0}")]
    NoStabilization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
