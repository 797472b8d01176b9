use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator, the routing layer and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid dimension {0}: width must be at least 2")]
    InvalidDimension(usize),

    #[error("domain error: {0}")]
    Domain(String),

    /// A topology or scenario document could not be parsed.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A document parsed but violates a structural invariant.
    #[error("validation failed{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Validation { line: Option<usize>, msg: String },

    /// The caller asked a protocol to use an entanglement link that is not there.
    /// This always indicates a routing bug and aborts the trial.
    #[error("protocol logic error: {0}")]
    ProtocolLogic(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Validation {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
