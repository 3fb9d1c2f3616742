use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Rejected configuration (bad factor sums, out-of-range knobs, malformed rules).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Source or bundle input could not be turned into a corpus.
    #[error("ingestion failed: {0}")]
    Ingest(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("nothing to cluster: every entity was scoped out of the business layer")]
    NothingToCluster,

    #[error("unanswerable query: text normalizes to no known or unknown terms")]
    UnanswerableQuery,

    #[error("portfolio requires at least 2 applications, got {0}")]
    PortfolioTooSmall(usize),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnanswerableQuery => 1,
            Error::Ingest(_)
            | Error::Parse { .. }
            | Error::NothingToCluster
            | Error::PortfolioTooSmall(_)
            | Error::Io { .. }
            | Error::Json(_) => 2,
            Error::Internal(_) => 3,
        }
    }
}
