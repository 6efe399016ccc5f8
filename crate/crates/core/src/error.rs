use thiserror::Error;

/// Errors raised by the evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its documented range (order caps, a ∉ [0,1], ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The argument lies outside the domain of the requested branch or function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result is not representable in double precision.
    #[error("range error: {0}")]
    Range(String),

    /// Branch constants are not defined for this value of `a`.
    #[error("branch constants undefined for a = {0}")]
    UndefinedConstants(f64),

    /// An iterative solver exhausted its iteration budget.
    #[error("no convergence after {iterations} iterations ({context})")]
    NoConvergence { iterations: usize, context: String },

    /// The evaluation point is a singularity of the requested quantity.
    #[error("singular point: {0}")]
    Singular(String),

    /// The requested combination is not supported (e.g. no closed form exists).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The quantity diverges.
    #[error("divergent: {0}")]
    Divergent(String),

    /// Quadrature did not reach the requested tolerance.
    #[error("requested tolerance {requested:e} not reached; estimate {estimate} with error {achieved:e}")]
    Accuracy {
        requested: f64,
        estimate: f64,
        achieved: f64,
    },

    /// A stated precondition of a routine, such as the valid range of a bound, does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
