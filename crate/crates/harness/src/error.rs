use std::path::PathBuf;

use coherence_core::CoreError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{path}: config hash {found} does not match the current configuration ({expected})")]
    HashMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("missing {what} at {path}; run `{stage}` first")]
    MissingStage {
        what: &'static str,
        path: PathBuf,
        stage: &'static str,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl HarnessError {
    /// Process exit code: 2 config, 3 data, 4 cap exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Core(e) if e.is_cap() => 4,
            HarnessError::Core(
                CoreError::InvalidCircuit(_) | CoreError::InvalidNoiseModel(_) | CoreError::OutOfRange { .. },
            ) => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}

/// Re-tags core validation failures raised while checking a config.
pub(crate) fn as_config(e: CoreError) -> HarnessError {
    if e.is_cap() {
        HarnessError::Core(e)
    } else {
        HarnessError::Config(e.to_string())
    }
}
