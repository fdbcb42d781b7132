use thiserror::Error;

/// Errors surfaced by the library. CLI exit codes map onto these variants.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("impossible observation: {0}")]
    ImpossibleObservation(String),
    #[error("stale policy: {0}")]
    StalePolicy(String),
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
