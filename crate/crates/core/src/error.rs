use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("configuration error on line {line}, key `{key}`: {reason}")]
    ConfigKey {
        key: String,
        line: usize,
        reason: String,
    },

    #[error("non-finite sample in field `{0}`")]
    NonFinite(&'static str),

    #[error("solution blew up{} (t = {time})", step_suffix(.step))]
    BlowUp { step: Option<usize>, time: f64 },

    #[error("run with eps = {eps} failed: {source}")]
    RunFailed {
        eps: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot project mass: intermediate mass is zero while the target is {target}")]
    DegenerateProjection { target: f64 },

    #[error("cannot compare states: {0}")]
    Comparison(String),

    #[error("wave function reconstruction needs eps > 0 (got {0})")]
    InvalidReconstruction(f64),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn step_suffix(step: &Option<usize>) -> String {
    step.map(|s| format!(" at step {s}")).unwrap_or_default()
}

impl Error {
    /// True for solver divergence, including divergence reported from inside a sweep.
    pub fn is_blow_up(&self) -> bool {
        match self {
            Error::BlowUp { .. } => true,
            Error::RunFailed { source, .. } => source.is_blow_up(),
            _ => false,
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::ConfigKey { .. })
    }
}
