use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library. Infeasible gear trains and failed rollouts
/// are data, not errors; these are reserved for contract violations and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("infeasible gear train: {0}")]
    InfeasibleTrain(String),

    #[error("no feasible actuator at ratio {ratio}")]
    NoFeasibleActuator { ratio: f64 },

    #[error("link length {length} m outside [{min}, {max}] m")]
    LinkLengthOutOfRange { length: f64, min: f64, max: f64 },

    #[error("non-finite cost {cost} for candidate {index}")]
    NonFiniteCost { index: usize, cost: f64 },

    #[error("manifest inconsistent: {}", .0.join(", "))]
    Inconsistent(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad configuration (as opposed to runtime/I/O).
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::LinkLengthOutOfRange { .. } | Error::Json { .. }
        )
    }
}
