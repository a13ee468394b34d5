use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    /// The model lacks the asymptotic description the operation needs.
    #[error("unsupported asymptotics: {0}")]
    UnsupportedAsymptotics(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("solver divergence: {0}")]
    SolverDivergence(String),

    #[error("model spec error: {0}")]
    Spec(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
