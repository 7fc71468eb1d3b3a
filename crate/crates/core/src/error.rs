use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("manifest lists no documents")]
    EmptyManifest,

    #[error("document `{id}`: {reason}")]
    Ingest { id: String, reason: String },

    #[error("document `{id}`: unparseable date `{date}`")]
    InvalidDate { id: String, date: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown period {0}")]
    UnknownPeriod(String),

    /// An operation needs an artifact that no creator has produced yet.
    #[error("missing artifact `{artifact}` for period {period}; run `{hint}` first")]
    MissingArtifact {
        artifact: &'static str,
        period: String,
        hint: &'static str,
    },

    #[error("`{word}` is not in the vocabulary of period {period}")]
    OutOfVocabulary { word: String, period: String },

    #[error("Jaccard index undefined for two empty vocabularies ({a}, {b})")]
    UndefinedJaccard { a: String, b: String },

    #[error("vocabulary of period {0} is empty")]
    EmptyVocabulary(String),

    #[error("{0}")]
    Validation(String),

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {}: {reason}", path.display())]
    Format { path: PathBuf, reason: String },

    #[error("{0}")]
    Internal(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Stable machine-readable code used in error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyManifest => "empty-manifest",
            Error::Ingest { .. } => "ingest",
            Error::InvalidDate { .. } => "invalid-date",
            Error::Parameter(_) => "parameter",
            Error::UnknownPeriod(_) => "unknown-period",
            Error::MissingArtifact { .. } => "missing-artifact",
            Error::OutOfVocabulary { .. } => "out-of-vocabulary",
            Error::UndefinedJaccard { .. } => "undefined-jaccard",
            Error::EmptyVocabulary(_) => "empty-vocabulary",
            Error::Validation(_) => "validation",
            Error::Json { .. } => "json",
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
            Error::Internal(_) => "internal",
        }
    }

    /// Structured details for error reports; `null` when the message says it all.
    pub fn context(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            Error::Ingest { id, .. } => json!({ "document": id }),
            Error::InvalidDate { id, date } => json!({ "document": id, "date": date }),
            Error::UnknownPeriod(p) | Error::EmptyVocabulary(p) => json!({ "period": p }),
            Error::MissingArtifact { artifact, period, hint } => {
                json!({ "artifact": artifact, "period": period, "command": hint })
            }
            Error::OutOfVocabulary { word, period } => json!({ "word": word, "period": period }),
            Error::UndefinedJaccard { a, b } => json!({ "periods": [a, b] }),
            Error::Json { context, source } => {
                json!({ "source": context, "line": source.line(), "column": source.column() })
            }
            Error::Io { path, .. } | Error::Format { path, .. } => json!({ "path": path }),
            _ => serde_json::Value::Null,
        }
    }

    /// Process exit code: 1 internal, 2 usage/parameter, 3 missing artifact.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingArtifact { .. } => 3,
            Error::Io { .. } | Error::Internal(_) => 1,
            _ => 2,
        }
    }
}
