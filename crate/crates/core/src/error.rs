use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("more than {cap} semi-axes are at least {epsilon:e}; the threshold is too small for the configured cap")]
    OverflowBudget { epsilon: f64, cap: usize },

    #[error("tau must be >= 1, got {0}")]
    InvalidTau(f64),

    #[error("quadrature did not reach tolerance {tol:e} within {budget} panel subdivisions (estimate {estimate:e})")]
    QuadratureNonConvergence { tol: f64, budget: usize, estimate: f64 },

    #[error("argument outside the domain: {0}")]
    DomainError(String),

    #[error("could not bracket the critical radius: {0}")]
    BracketFailure(String),

    #[error("eigenvalue enumeration exceeds the cap of {cap} eigenvalues")]
    BudgetExceeded { cap: usize },

    #[error("unsupported family for this prediction: {0}")]
    UnsupportedFamily(String),

    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    #[error("no elasticity index is known for this model")]
    UnknownIndex,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for failures of a numerical budget or solver (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::OverflowBudget { .. }
                | Error::QuadratureNonConvergence { .. }
                | Error::BracketFailure(_)
                | Error::BudgetExceeded { .. }
        )
    }

    /// Stable upper-case identifier, used in machine-readable error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "INVALID_MODEL",
            Error::OverflowBudget { .. } => "OVERFLOW_BUDGET",
            Error::InvalidTau(_) => "INVALID_TAU",
            Error::QuadratureNonConvergence { .. } => "QUADRATURE_NON_CONVERGENCE",
            Error::DomainError(_) => "DOMAIN_ERROR",
            Error::BracketFailure(_) => "BRACKET_FAILURE",
            Error::BudgetExceeded { .. } => "BUDGET_EXCEEDED",
            Error::UnsupportedFamily(_) => "UNSUPPORTED_FAMILY",
            Error::InvalidExponents(_) => "INVALID_EXPONENTS",
            Error::UnknownIndex => "UNKNOWN_INDEX",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
