use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    InvalidRecord { line: usize, reason: String },

    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("embedding dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("missing embedding for ({id}, {field})")]
    MissingEmbedding { id: String, field: String },

    #[error("tag count mismatch for `{id}`: {tokens} tokens, {tags} tags")]
    TagMismatch { id: String, tokens: usize, tags: usize },

    #[error("feature table: {0}")]
    Table(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("k = {k} exceeds the number of distinct points ({distinct})")]
    TooFewPoints { k: usize, distinct: usize },

    #[error("label {0} is absent from the reference")]
    LabelMissing(u8),

    #[error("profile has no {0}")]
    ProfileIncomplete(&'static str),

    #[error("all differences are zero")]
    AllZeroDifferences,

    #[error("degenerate kappa denominator: expected disagreement is zero")]
    DegenerateKappa,

    #[error("class {0} has no samples")]
    EmptyClass(u8),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
