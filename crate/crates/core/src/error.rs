use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{context}, line {line}: {message}")]
    Format {
        context: String,
        line: usize,
        message: String,
    },

    #[error("dim mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("duplicate word {0:?}")]
    DuplicateWord(String),

    #[error("duplicate document id {0:?}")]
    DuplicateDocId(String),

    #[error("out-of-vocabulary word {0:?}")]
    OutOfVocabulary(String),

    #[error("invalid query vector: {0}")]
    InvalidQuery(String),

    #[error("insufficient pairs: {found} usable, at least {needed} required")]
    InsufficientPairs { needed: usize, found: usize },

    #[error("singular normal matrix; try lambda > 0")]
    SingularMatrix,

    #[error("no evaluable pairs")]
    NoEvaluablePairs,

    #[error("document {0:?} has no gold topic")]
    MissingTopic(String),

    #[error("empty vocabulary")]
    EmptyVocabulary,

    #[error("empty fingerprint{}", doc.as_ref().map(|d| format!(" for document {d:?}")).unwrap_or_default())]
    EmptyFingerprint { doc: Option<String> },

    #[error("document {doc:?} has unknown language {lang:?}")]
    UnknownLanguage { doc: String, lang: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("method {method} requires {input}")]
    MissingInput { method: String, input: String },
}

/// Coarse error classes, used by the command-line front end to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Format,
    Input,
    Numerical,
    MissingInput,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } => ErrorClass::Io,
            Error::Format { .. } | Error::DuplicateWord(_) | Error::DuplicateDocId(_) => ErrorClass::Format,
            Error::SingularMatrix | Error::InsufficientPairs { .. } => ErrorClass::Numerical,
            Error::MissingInput { .. } => ErrorClass::MissingInput,
            _ => ErrorClass::Input,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(context: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            context: context.into(),
            line,
            message: message.into(),
        }
    }
}
