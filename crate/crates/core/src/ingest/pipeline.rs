//! End-to-end preprocessing: target, engineered dates, macro join, split,
//! then imputation → one-hot → standardization → pruning fitted on train rows.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::encode::{CategoricalEncoder, Imputer, MAX_LEVELS};
use super::macro_series::{derive_month_span, merge_macro, MacroSeries};
use super::matrix::{DroppedColumn, FeatureMatrix};
use super::prune::{apply_drops, collinear_drops, DEFAULT_THRESHOLD};
use super::split::stratified_indices;
use super::standardize::Standardizer;
use super::table::{ColumnRole, ColumnSpec, RawTable};
use super::target::{derive_target, StatusMap};
use crate::{Error, Result};

fn default_history_feature() -> String {
    "CreditHistoryMonths".to_string()
}

/// Column roles plus the names of the special columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub status_column: String,
    /// Loan origination date; macro series are joined on its month.
    pub origination_column: String,
    /// First recorded credit line; with the origination date it yields the
    /// credit-history length feature.
    #[serde(default)]
    pub credit_line_column: Option<String>,
    #[serde(default = "default_history_feature")]
    pub history_feature: String,
    #[serde(default)]
    pub id_column: Option<String>,
    #[serde(default)]
    pub status_map: StatusMap,
    pub columns: Vec<ColumnSpec>,
}

impl Schema {
    /// Plain-language label for a raw column, falling back to its name.
    pub fn label(&self, column: &str) -> String {
        self.columns
            .iter()
            .find(|c| c.name == column)
            .and_then(|c| c.label.clone())
            .unwrap_or_else(|| column.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepareConfig {
    pub split_ratio: f64,
    pub seed: u64,
    pub collinearity_threshold: f64,
    pub max_levels: usize,
}

impl Default for PrepareConfig {
    fn default() -> Self {
        PrepareConfig {
            split_ratio: 0.8,
            seed: 42,
            collinearity_threshold: DEFAULT_THRESHOLD,
            max_levels: MAX_LEVELS,
        }
    }
}

/// Every parameter needed to transform new rows exactly like the training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub imputer: Imputer,
    pub encoder: CategoricalEncoder,
    pub standardizer: Standardizer,
    pub collinear: Vec<DroppedColumn>,
    pub features: Vec<String>,
    pub id_column: Option<String>,
}

impl Preprocessor {
    pub fn fit(
        table: &RawTable,
        target: &[u8],
        fit_rows: &[usize],
        cfg: &PrepareConfig,
        id_column: Option<&str>,
    ) -> Result<Self> {
        let imputer = Imputer::fit(table, fit_rows)?;
        let imputed = imputer.apply(table);
        let encoder = CategoricalEncoder::fit(&imputed, fit_rows, cfg.max_levels)?;
        let encoded = encoder.transform(&imputed)?;
        let unscaled = FeatureMatrix::from_table(&encoded, target.to_vec())?;
        let standardizer = Standardizer::fit(&unscaled, fit_rows);
        let scaled = standardizer.apply(&unscaled)?;
        let collinear = collinear_drops(&scaled, fit_rows, cfg.collinearity_threshold)?;
        let features = apply_drops(&scaled, &collinear).names();
        Ok(Preprocessor {
            imputer,
            encoder,
            standardizer,
            collinear,
            features,
            id_column: id_column.map(str::to_string),
        })
    }

    /// Transforms the given rows with the fitted parameters only.
    pub fn transform(&self, table: &RawTable, target: &[u8], rows: &[usize]) -> Result<FeatureMatrix> {
        let sub = table.select_rows(rows);
        let sub_target: Vec<u8> = rows.iter().map(|&r| target[r]).collect();
        let imputed = self.imputer.apply(&sub);
        let encoded = self.encoder.transform(&imputed)?;
        let unscaled = FeatureMatrix::from_table(&encoded, sub_target)?;
        let scaled = self.standardizer.apply(&unscaled)?;
        let mut out = apply_drops(&scaled, &self.collinear);
        if out.names() != self.features {
            return Err(Error::FeatureMismatch(out.names()));
        }
        if let Some(id) = &self.id_column {
            if let Some(col) = sub.column(id) {
                out.row_ids = col.cells.clone();
            }
        }
        out.validate()?;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrepareSummary {
    pub rows_in: usize,
    pub dropped_by_status: BTreeMap<String, usize>,
    pub dropped_by_macro: usize,
    pub rows_out: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub columns_out: usize,
    pub positive_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
    pub preprocessor: Preprocessor,
    pub summary: PrepareSummary,
}

/// Runs the whole ingest stage on a loaded loan table.
pub fn prepare(
    table: &RawTable,
    series: &[MacroSeries],
    schema: &Schema,
    cfg: &PrepareConfig,
) -> Result<Prepared> {
    let mut table = table.clone();
    if let Some(first_line) = &schema.credit_line_column {
        derive_month_span(
            &mut table,
            first_line,
            &schema.origination_column,
            &schema.history_feature,
        )?;
    }
    let target = derive_target(&table, &schema.status_column, &schema.status_map)?;
    let labelled = table.select_rows(&target.kept);
    let (merged, labels, dropped_by_macro) = if series.is_empty() {
        (labelled, target.labels.clone(), 0)
    } else {
        let m = merge_macro(&labelled, series, &schema.origination_column)?;
        let labels: Vec<u8> = m.kept.iter().map(|&i| target.labels[i]).collect();
        (m.table, labels, m.dropped)
    };
    if merged.n_rows() == 0 {
        return Err(Error::AllRowsDropped(table.n_rows()));
    }
    let (train_rows, test_rows) = stratified_indices(&labels, cfg.split_ratio, cfg.seed)?;
    let id_col = schema
        .id_column
        .as_deref()
        .filter(|id| merged.column(id).is_some_and(|c| c.role == ColumnRole::Id));
    let pre = Preprocessor::fit(&merged, &labels, &train_rows, cfg, id_col)?;
    let train = pre.transform(&merged, &labels, &train_rows)?;
    let test = pre.transform(&merged, &labels, &test_rows)?;
    let positives = labels.iter().filter(|&&y| y == 1).count();
    Ok(Prepared {
        summary: PrepareSummary {
            rows_in: table.n_rows(),
            dropped_by_status: target.dropped,
            dropped_by_macro,
            rows_out: merged.n_rows(),
            train_rows: train.n_rows(),
            test_rows: test.n_rows(),
            columns_out: train.n_cols(),
            positive_rate: positives as f64 / labels.len() as f64,
        },
        train,
        test,
        preprocessor: pre,
    })
}
