use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a model or scenario invariant. `key` names the
    /// offending field.
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },

    /// The scenario or grid document could not be parsed.
    #[error("parse error in {source_name}: {message}")]
    Parse {
        source_name: String,
        message: String,
    },

    #[error("steering angle {0} rad is outside (-pi/2, pi/2)")]
    InvalidSteer(f64),

    #[error("grid symbol `{symbol}` does not apply to a {context} scenario")]
    InapplicableSymbol { symbol: String, context: String },

    #[error("scenario {id}: {source}")]
    Episode {
        id: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("requested time {0} s is outside the logged trajectory")]
    TimeOutOfRange(f64),

    #[error("{0}")]
    Empty(&'static str),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            key: key.into(),
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
