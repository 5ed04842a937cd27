use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grain mismatch: expected N={expected}, found N={found}")]
    GrainMismatch { expected: u32, found: u32 },

    #[error("{what} refuses N={n} (limit {limit})")]
    Guard { what: &'static str, n: u64, limit: u64 },

    #[error("{what} did not converge after {iterations} iterations (best estimate {best})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        best: f64,
    },

    #[error("rectangle {0} does not fit in the grain")]
    OutOfGrain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("family is empty")]
    EmptyFamily,

    #[error("no family member carries a positive weight")]
    EmptyDomain,

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn guard(what: &'static str, n: impl Into<u64>, limit: impl Into<u64>) -> Self {
        Error::Guard {
            what,
            n: n.into(),
            limit: limit.into(),
        }
    }
}
