use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error in {what}: {message}")]
    Syntax { what: String, message: String },

    #[error("spec has {} error finding(s); first: {}", .0.len(), .0.first().map(ToString::to_string).unwrap_or_default())]
    InvalidSpec(Vec<crate::finding::Finding>),

    #[error("reference error: {0}")]
    Reference(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("empty file: {0}")]
    EmptyFile(PathBuf),

    #[error("unknown item column `{0}` (not declared in the spec)")]
    UnknownItem(String),

    #[error("duplicate respondent id `{0}`")]
    DuplicateRespondent(String),

    #[error("duplicate rater id `{0}`")]
    DuplicateRater(String),

    #[error("missing response for respondent `{respondent}` on item `{item}`")]
    MissingCell { respondent: String, item: String },

    #[error("rating file mixes modes: {0}")]
    MixedModes(String),

    #[error("rating file is missing the `# mode=cvr3|scale5` header line")]
    MissingMode,

    #[error("CVR requires ≥ 2 raters, found {0}")]
    TooFewRaters(usize),

    #[error("operation needs {expected} ratings but the set is in {found} mode")]
    WrongRatingMode { expected: &'static str, found: &'static str },

    #[error("construct `{construct}`: {message}")]
    Weights { construct: String, message: String },

    #[error("construct `{0}` has no content-valid items")]
    NoValidItems(String),

    #[error("item `{item}` is not present in the dataset")]
    ItemNotInDataset { item: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("dataset has {0} missing cell(s); apply a missing-data policy first")]
    IncompleteData(usize),

    #[error("zero total-score variance; alpha is undefined")]
    ZeroTotalVariance,

    #[error("construct `{0}`: every item column is constant")]
    ConstantBlock(String),

    #[error("respondent sets differ between child composites (`{0}` vs `{1}`)")]
    RespondentMismatch(String, String),

    #[error("target correlation matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing upstream result for construct `{construct}`: {what}")]
    MissingUpstream { construct: String, what: String },

    #[error("iteration id `{0}` already exists in the project history")]
    DuplicateIteration(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
