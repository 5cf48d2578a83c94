//! Missing-value imputation and one-hot encoding, fitted on a row subset.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::table::{ColumnRole, RawColumn, RawTable};
use crate::{Error, Result};

pub const MAX_LEVELS: usize = 64;
pub const MISSING_LEVEL: &str = "Missing";

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("na") || c.eq_ignore_ascii_case("nan")
}

fn level_of(cell: &str) -> String {
    if is_missing(cell) {
        MISSING_LEVEL.to_string()
    } else {
        cell.trim().to_string()
    }
}

/// Median imputation for continuous columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Imputer {
    pub medians: Vec<(String, f64)>,
}

impl Imputer {
    /// Medians of the parseable cells in `rows`; a column with none gets 0.
    pub fn fit(table: &RawTable, rows: &[usize]) -> Result<Self> {
        let mut medians = Vec::new();
        for col in table.columns() {
            if col.role != ColumnRole::Continuous {
                continue;
            }
            let mut vals = Vec::with_capacity(rows.len());
            for &r in rows {
                let cell = &col.cells[r];
                if is_missing(cell) {
                    continue;
                }
                vals.push(parse_cell(cell, r, &col.name)?);
            }
            medians.push((col.name.clone(), median(&mut vals)));
        }
        Ok(Imputer { medians })
    }

    pub fn apply(&self, table: &RawTable) -> RawTable {
        let columns = table
            .columns()
            .iter()
            .map(|c| match self.medians.iter().find(|(n, _)| *n == c.name) {
                Some((_, m)) if c.role == ColumnRole::Continuous => RawColumn {
                    name: c.name.clone(),
                    role: c.role,
                    cells: c
                        .cells
                        .iter()
                        .map(|x| if is_missing(x) { format!("{m}") } else { x.clone() })
                        .collect(),
                },
                _ => c.clone(),
            })
            .collect();
        RawTable::new(columns).expect("imputation preserves shape")
    }
}

fn parse_cell(cell: &str, row: usize, column: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            row,
            column: column.to_string(),
            value: cell.to_string(),
            what: "number",
        })
}

fn median(vals: &mut [f64]) -> f64 {
    if vals.is_empty() {
        return 0.0;
    }
    vals.sort_by(f64::total_cmp);
    let n = vals.len();
    if n % 2 == 1 {
        vals[n / 2]
    } else {
        0.5 * (vals[n / 2 - 1] + vals[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedColumn {
    pub name: String,
    /// Observed levels, sorted.
    pub levels: Vec<String>,
}

/// Full k-indicator one-hot encoder. Levels unseen at fit time encode as all zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalEncoder {
    pub columns: Vec<EncodedColumn>,
}

impl CategoricalEncoder {
    pub fn fit(table: &RawTable, rows: &[usize], max_levels: usize) -> Result<Self> {
        let mut columns = Vec::new();
        for col in table.columns() {
            if col.role != ColumnRole::Categorical {
                continue;
            }
            let levels: BTreeSet<String> = rows.iter().map(|&r| level_of(&col.cells[r])).collect();
            if levels.len() > max_levels {
                return Err(Error::TooManyLevels {
                    column: col.name.clone(),
                    levels: levels.len(),
                    limit: max_levels,
                });
            }
            columns.push(EncodedColumn {
                name: col.name.clone(),
                levels: levels.into_iter().collect(),
            });
        }
        Ok(CategoricalEncoder { columns })
    }

    /// Replaces each fitted categorical column, in place, by indicator columns
    /// named `column=level`.
    pub fn transform(&self, table: &RawTable) -> Result<RawTable> {
        let mut out = Vec::with_capacity(table.n_cols());
        for col in table.columns() {
            let enc = match self.columns.iter().find(|e| e.name == col.name) {
                Some(e) if col.role == ColumnRole::Categorical => e,
                _ => {
                    out.push(col.clone());
                    continue;
                }
            };
            let row_levels: Vec<String> = col.cells.iter().map(|c| level_of(c)).collect();
            for level in &enc.levels {
                out.push(RawColumn {
                    name: format!("{}={}", col.name, level),
                    role: ColumnRole::Indicator,
                    cells: row_levels
                        .iter()
                        .map(|l| if l == level { "1" } else { "0" }.to_string())
                        .collect(),
                });
            }
        }
        RawTable::new(out)
    }
}

/// One-hot encodes every categorical column using the levels observed in the table.
pub fn encode_categoricals(table: &RawTable) -> Result<RawTable> {
    let rows: Vec<usize> = (0..table.n_rows()).collect();
    CategoricalEncoder::fit(table, &rows, MAX_LEVELS)?.transform(table)
}
