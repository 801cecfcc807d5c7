use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("capacity exceeded: {what} (limit {limit})")]
    Capacity { what: String, limit: u64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("quadrature did not converge after {levels} levels (achieved relative change {achieved:e})")]
    Quadrature { achieved: f64, levels: u32 },

    #[error("sampler configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
