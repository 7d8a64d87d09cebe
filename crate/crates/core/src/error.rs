use thiserror::Error;

/// Errors produced by the kernel, the environment, the agents and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerics fault in {routine}: {detail}")]
    Numerics {
        routine: &'static str,
        detail: String,
    },

    #[error("infeasible instance: no arm has risk at most alpha = {alpha}")]
    Infeasible { alpha: f64 },

    #[error("invalid agent spec: {0}")]
    InvalidSpec(String),

    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("inadmissible pair ({0}, {1}): both risk indices exceed alpha")]
    InadmissiblePair(usize, usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("trial {trial} of agent `{agent}` failed: {source}")]
    Trial {
        agent: String,
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn numerics(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::Numerics {
            routine,
            detail: detail.into(),
        }
    }
}
