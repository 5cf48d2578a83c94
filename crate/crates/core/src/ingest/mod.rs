//! Loan-table ingestion and preprocessing.

pub mod encode;
pub mod macro_series;
pub mod matrix;
pub mod pipeline;
pub mod prune;
pub mod split;
pub mod standardize;
pub mod table;
pub mod target;

pub use encode::{encode_categoricals, CategoricalEncoder, Imputer};
pub use macro_series::{merge_macro, MacroSeries, YearMonth};
pub use matrix::{ColumnKind, DropReason, DroppedColumn, FeatureColumn, FeatureMatrix, Scaling};
pub use pipeline::{prepare, PrepareConfig, PrepareSummary, Prepared, Preprocessor, Schema};
pub use prune::prune_collinear;
pub use split::{split, stratified_indices, SplitPair};
pub use standardize::{inverse_standardize, standardize, Standardizer};
pub use table::{ColumnRole, ColumnSpec, RawColumn, RawTable};
pub use target::{derive_target, StatusMap, TargetOutcome};
