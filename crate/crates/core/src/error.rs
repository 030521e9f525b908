use thiserror::Error;

use crate::groebner::GroebnerStats;

pub type Result<T> = std::result::Result<T, HbmError>;

#[derive(Debug, Clone, Error)]
pub enum HbmError {
    #[error("division by zero")]
    DivisionByZero,

    #[error("polynomials live over different variable lists: {left:?} vs {right:?}")]
    MismatchedVariables { left: Vec<String>, right: Vec<String> },

    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("budget exhausted: {reason} ({stats})")]
    BudgetExhausted { reason: String, stats: GroebnerStats },

    #[error("ideal not zero-dimensional or wrong order: {0}")]
    NotZeroDimensional(String),

    #[error("interval endpoint {0} is a root; perturb the endpoint")]
    EndpointIsRoot(String),

    #[error("inconsistent branch: {0}")]
    InconsistentBranch(String),

    #[error("no admissible solution for m = {m}, N = {order}: {reason}")]
    NoAdmissibleSolution { m: u32, order: usize, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}
