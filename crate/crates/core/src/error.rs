use thiserror::Error;

/// Errors raised by the algebra and solver layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MahlerError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational function has a pole at the evaluation point {0}")]
    PoleAtEvaluationPoint(String),
    #[error("series is not invertible on its certified mask")]
    ZeroDivisor,
    #[error("series is zero")]
    ZeroSeries,
    #[error("leading term is not certified by the guarantee mask")]
    UnknownLeadingTerm,
    #[error("operators have different radices ({0} vs {1})")]
    RadixMismatch(u32, u32),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("plan mismatch: {0}")]
    PlanMismatch(String),
    #[error("characteristic polynomial of slope {slope} has non-rational roots")]
    NonRationalExponent { slope: String },
    #[error("factorization failed: {0}")]
    FactorizationFailed(String),
}

pub type Result<T, E = MahlerError> = std::result::Result<T, E>;
