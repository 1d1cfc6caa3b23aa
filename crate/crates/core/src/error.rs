use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge: value {value}, error estimate {error_estimate} after {evaluations} evaluations")]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteEvaluation { x: f64 },

    #[error("integrand does not decay fast enough at the boundary of the disc")]
    SingularBoundary,

    #[error("gamma pole: factor {factor} has argument {argument}")]
    PoleAtNonPositiveInteger { factor: usize, argument: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole hit: x = -a_{index}")]
    PoleHit { index: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("point lies on the special cycle (R = {r:e})")]
    OnCycle { r: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
