use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the harness. Each maps to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] smooth_moments::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad arguments or config, 3 for a strict-mode validity
    /// violation, 4 for capacity limits, 1 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        use smooth_moments::Error as E;
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Core(E::Argument(_) | E::Domain(_)) => 2,
            HarnessError::Core(E::Validity(_)) => 3,
            HarnessError::Core(E::Capacity { .. } | E::Convergence { .. }) => 4,
            HarnessError::Io { .. } | HarnessError::Csv { .. } | HarnessError::Json { .. } => 1,
        }
    }
}
