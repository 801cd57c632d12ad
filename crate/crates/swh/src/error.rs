use std::path::PathBuf;

use swh_core::CoreError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("service error: {0}")]
    Service(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Short category tag printed with CLI errors.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Core(e) => match e {
                CoreError::Argument(_) | CoreError::EmptyInput(_) => "argument",
                CoreError::Validation { .. } => "validation",
                CoreError::Training(_) | CoreError::Divergence { .. } | CoreError::Singular(_) => "training",
                CoreError::UnsupportedKind(_) => "unsupported",
                CoreError::Grid(_) => "grid",
                CoreError::Capacity { .. } => "capacity",
            },
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Usage(_) => "usage",
            Error::Service(_) => "service",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            _ => 1,
        }
    }
}
