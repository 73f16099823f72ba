use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // dataset
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("unknown traffic class `{label}` at row {row}")]
    UnknownClass { label: String, row: usize },
    #[error("non-numeric cell `{value}` at row {row}, column `{column}`")]
    NonNumeric {
        value: String,
        row: usize,
        column: String,
    },
    #[error("negative counter {value} at row {row}, column `{column}`")]
    NegativeCounter {
        value: f64,
        row: usize,
        column: String,
    },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("feature subset is empty")]
    EmptySubset,
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("unknown MIB group `{0}`")]
    UnknownGroup(String),
    #[error("bin count must be at least 2, got {0}")]
    BinCountTooSmall(usize),
    #[error("invalid class count: {0}")]
    InvalidCount(String),
    #[error("record width {got} does not match schema width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("feature value {0} is not finite")]
    NonFinite(f64),

    // featsel
    #[error("dataset is not discretized: {0}")]
    NotDiscretized(String),
    #[error("need at least two classes, found one")]
    SingleClass,
    #[error("n = {n} out of range 1..={max}")]
    NOutOfRange { n: usize, max: usize },
    #[error("invalid genetic search configuration: {0}")]
    InvalidGaConfig(String),
    #[error("threshold {t} out of range 1..={max}")]
    ThresholdOutOfRange { t: usize, max: usize },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("malformed subset literal `{0}`")]
    BadSubsetLiteral(String),

    // learn
    #[error("smoothing must be positive, got {0}")]
    InvalidSmoothing(f64),
    #[error("invalid classifier configuration: {0}")]
    InvalidConfig(String),
    #[error("vector lengths differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("SMO did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("malformed model file: {0}")]
    ModelFormat(String),

    // eval
    #[error("label sequences differ in length: {actual} actual vs {predicted} predicted")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("no labels to evaluate")]
    EmptyInput,
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("fold count {k} out of range 2..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
