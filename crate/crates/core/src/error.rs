use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or field parameter is outside its allowed domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A density matrix failed one of the generic-path preconditions.
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// The evolution needs a Fock index the truncated field space does not hold.
    #[error("field truncation overflow: index {needed} exceeds cutoff {cutoff}")]
    Truncation { needed: u32, cutoff: u32 },

    #[error("population outside the qubit subspace ({leakage:.3e}) exceeds bound {bound:.3e}")]
    LeakageExceeded { leakage: f64, bound: f64 },

    /// Bad configuration value, reported with the offending key.
    #[error("config `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown preset `{0}` (expected one of fig2, fig3, fig4, fig5, fig6)")]
    UnknownPreset(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A numerical validation target was not met.
    #[error("validation failed: {0}")]
    Validation(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
