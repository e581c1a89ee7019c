use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by configuration handling, simulation and output emission.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("non-finite value in link budget: ue {ue_id}, cell {cell_id}")]
    NonFinite { ue_id: u32, cell_id: u32 },

    #[error("{0}")]
    Usage(String),

    #[error("sweep table is empty; nothing to plot")]
    EmptyTable,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failure while
    /// running the model or writing outputs.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_) | Error::ConfigParse { .. } | Error::UnknownKey(_) | Error::Usage(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
