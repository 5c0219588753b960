use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("root is not bracketed on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations (bracket width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },

    #[error("no grid point satisfies the validity region: {0}")]
    EmptyRegion(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
