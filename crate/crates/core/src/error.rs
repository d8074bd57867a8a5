use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SteinError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("insufficient samples: need at least {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("oracle infeasible: {0}")]
    OracleInfeasible(String),
    #[error("model bug: {0}")]
    ModelBug(String),
    #[error("unknown identifier: {0}")]
    Unknown(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, SteinError>;

pub(crate) fn invalid(msg: impl Into<String>) -> SteinError {
    SteinError::InvalidParameter(msg.into())
}

impl From<std::io::Error> for SteinError {
    fn from(e: std::io::Error) -> Self {
        SteinError::Io(e.to_string())
    }
}
