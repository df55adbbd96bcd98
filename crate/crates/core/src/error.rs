use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("invalid score at predictor {predictor}, example {example}: {value}")]
    InvalidScore {
        predictor: usize,
        example: usize,
        value: f64,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("recall is undefined: no positive labels")]
    UndefinedRecall,

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("all member weights are zero")]
    DegenerateWeights,

    #[error("degenerate vector: {0}")]
    DegenerateVector(&'static str),

    #[error("statistic undefined: zero denominator")]
    UndefinedStatistic,

    #[error("no diversity is defined from the empty ensemble")]
    NoDiversityDefined,

    #[error("split error: {0}")]
    Split(String),

    #[error("curve error: {0}")]
    Curve(String),

    #[error("report error: {0}")]
    Report(String),

    #[error("invalid `{field}`: {reason}")]
    Generation { field: &'static str, reason: String },

    #[error("invalid `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error("strategy {0} is not implemented")]
    UnimplementedStrategy(&'static str),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn generation(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Generation {
            field,
            reason: reason.into(),
        }
    }
}
