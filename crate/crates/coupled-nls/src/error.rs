use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the admissible range (exponent window, grid size, zero field...).
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Fields living on different grids were combined.
    #[error("structural error: {0}")]
    Structural(String),
    /// An iterative method failed to bracket, converge or make progress.
    #[error("solver error: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
