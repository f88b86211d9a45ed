use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible sampler: bias {bias} must exceed the amplitude bound {amplitude}")]
    InfeasibleSampler { bias: f64, amplitude: f64 },

    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed stream: {0}")]
    MalformedStream(String),

    #[error("reconstruction failed: {reason} (residual {residual_norm:e}, condition {condition:e})")]
    Reconstruction {
        reason: String,
        residual_norm: f64,
        condition: f64,
    },

    #[error("counter overflow: {ticks} ticks do not fit in {width} bits")]
    CounterOverflow { ticks: u64, width: u32 },

    #[error("{context}: {source}")]
    Trial {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedStream(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Wraps the error with a description of the trial that produced it.
    pub fn in_trial(self, context: impl Into<String>) -> Self {
        Error::Trial {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
