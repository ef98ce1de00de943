use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("optimizer did not converge after {iterations} iterations (best objective {best:.9} bits)")]
    Convergence { iterations: usize, best: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
