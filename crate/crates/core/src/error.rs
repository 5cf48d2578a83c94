use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("declared column `{0}` not present in header")]
    MissingColumn(String),
    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("column `{column}` has role {actual}, expected {expected}")]
    WrongRole {
        column: String,
        expected: &'static str,
        actual: &'static str,
    },
    #[error("row {row}, column `{column}`: cannot parse `{value}` as {what}")]
    Parse {
        row: usize,
        column: String,
        value: String,
        what: &'static str,
    },
    #[error("all {0} rows were dropped during target derivation")]
    AllRowsDropped(usize),
    #[error("macro series `{name}`: {reason}")]
    InvalidSeries { name: String, reason: String },
    #[error("categorical column `{column}` has {levels} levels (limit {limit})")]
    TooManyLevels {
        column: String,
        levels: usize,
        limit: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("class {class} has {count} rows, need at least {needed}")]
    TooFewInClass {
        class: u8,
        count: usize,
        needed: usize,
    },
    #[error("training data must contain both classes")]
    SingleClass,
    #[error("non-finite loss at epoch {0}")]
    NonFiniteLoss(usize),
    #[error("feature mismatch: {0:?}")]
    FeatureMismatch(Vec<String>),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("singular system; use a ridge penalty lambda > 0")]
    Singular,
    #[error("degenerate perturbation design: all samples identical")]
    DegenerateDesign,
    #[error("background has no rows")]
    EmptyBackground,
    #[error("exact Shapley limited to {limit} features (got {features}); use kernel SHAP")]
    TooManyFeatures { features: usize, limit: usize },
    #[error("sample of {0} rows is too small")]
    SampleTooSmall(usize),
    #[error("explainer failed on {failed} of {total} instances")]
    ExplainerFailures { failed: usize, total: usize },
    #[error("weights must be non-negative and sum to 1 (sum = {0})")]
    InvalidWeights(f64),
}
