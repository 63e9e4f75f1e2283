use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("time-function error: {0}")]
    TimeFn(String),

    #[error("time-function table has no entry for z = {z} (last index {last})")]
    TableDomain { z: u64, last: u64 },

    #[error("bound cannot be proved: {0}")]
    Unprovable(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state limit exceeded: more than {0} DP states")]
    StateLimit(usize),

    #[error("no proving tree within enumeration limits: {0}")]
    InfeasibleWithinLimits(String),

    #[error("invalid tree: {0}")]
    Tree(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
