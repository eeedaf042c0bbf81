use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid span ({i}, {j}) for sentence of length {n}")]
    InvalidSpan { i: usize, j: usize, n: usize },

    #[error("sentence length must be at least 1")]
    EmptySentence,

    #[error("bracket parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("paraphrase set is empty")]
    EmptyParaphraseSet,

    #[error("score {value} at span ({i}, {j}) is outside [0, 1]")]
    ScoreOutOfRange { i: usize, j: usize, value: f64 },

    #[error("sentence too long for exhaustive search: {n} > {max}")]
    TooLong { n: usize, max: usize },

    #[error("unknown language code `{0}`")]
    UnknownLanguage(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Corpus { path: PathBuf, message: String },

    #[error("transport error: {0}")]
    Transport(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("prediction/gold mismatch: {0}")]
    Mismatch(String),

    #[error("nothing to evaluate: {0}")]
    NothingToEvaluate(String),

    #[error("statistic undefined: {0}")]
    Undefined(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
