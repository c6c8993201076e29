use thiserror::Error;

/// Errors reported by the space computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("conjugate did not converge at v = {v}: bracket exceeded 2^{doublings} (function is not an N-function at infinity)")]
    NonConvergence { v: f64, doublings: u32 },

    #[error("{0} requires an N-function")]
    NotNFunction(&'static str),

    #[error("element is not in the space: {0}")]
    NotInSpace(String),

    #[error("functional is not in the dual: {0}")]
    NotInDual(String),

    #[error("divergence classifier inconclusive near lambda = {0}")]
    Inconclusive(f64),

    #[error("infeasible witness parameters: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
