use std::path::PathBuf;

use grouplog_core::gen::GenError;
use grouplog_core::iso::IsoError;
use grouplog_core::{EvalError, GroupError, ParseError, PresentationError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
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
    #[error("{context}: {source}")]
    Group {
        context: String,
        #[source]
        source: GroupError,
    },
    #[error("{context}: {source}")]
    Formula {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error("{context}: {source}")]
    Presentation {
        context: String,
        #[source]
        source: PresentationError,
    },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Iso(#[from] IsoError),
    #[error("corpus max order {0} exceeds the cap 1024")]
    CorpusCap(usize),
    #[error("{0}")]
    Usage(String),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn group(context: impl Into<String>, source: GroupError) -> Self {
        HarnessError::Group {
            context: context.into(),
            source,
        }
    }
}
