use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// What a raw column is used for downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnRole {
    Continuous,
    Categorical,
    Date,
    TargetSource,
    Id,
    Ignore,
    /// One-hot indicator produced by the encoder; never declared in a schema.
    Indicator,
}

impl ColumnRole {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnRole::Continuous => "continuous",
            ColumnRole::Categorical => "categorical",
            ColumnRole::Date => "date",
            ColumnRole::TargetSource => "target-source",
            ColumnRole::Id => "id",
            ColumnRole::Ignore => "ignore",
            ColumnRole::Indicator => "indicator",
        }
    }
}

/// A column role declaration from the schema file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub role: ColumnRole,
    /// Plain-language name used in adverse-action notices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawColumn {
    pub name: String,
    pub role: ColumnRole,
    pub cells: Vec<String>,
}

/// Text-valued table with declared column roles.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    columns: Vec<RawColumn>,
    n_rows: usize,
}

impl RawTable {
    /// Validates equal cell counts and unique names.
    pub fn new(columns: Vec<RawColumn>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.cells.len());
        let mut seen = BTreeSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
            if c.cells.len() != n_rows {
                return Err(Error::DimensionMismatch {
                    expected: n_rows,
                    found: c.cells.len(),
                });
            }
        }
        Ok(RawTable { columns, n_rows })
    }

    /// Builds a table from a parsed header and records. Declared columns take
    /// their declared role; everything else becomes [`ColumnRole::Ignore`].
    /// Ragged records are rejected with their zero-based data-row index.
    pub fn from_records(
        header: &[String],
        records: &[Vec<String>],
        declared: &[ColumnSpec],
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for h in header {
            if !seen.insert(h.as_str()) {
                return Err(Error::DuplicateColumn(h.clone()));
            }
        }
        for spec in declared {
            if !seen.contains(spec.name.as_str()) {
                return Err(Error::MissingColumn(spec.name.clone()));
            }
        }
        for (row, rec) in records.iter().enumerate() {
            if rec.len() != header.len() {
                return Err(Error::RaggedRow {
                    row,
                    expected: header.len(),
                    found: rec.len(),
                });
            }
        }
        let columns = header
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let role = declared
                    .iter()
                    .find(|s| &s.name == name)
                    .map_or(ColumnRole::Ignore, |s| s.role);
                RawColumn {
                    name: name.clone(),
                    role,
                    cells: records.iter().map(|r| r[j].clone()).collect(),
                }
            })
            .collect();
        Ok(RawTable {
            columns,
            n_rows: records.len(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[RawColumn] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&RawColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Looks up a column and checks its role.
    pub fn column_with_role(&self, name: &str, role: ColumnRole) -> Result<&RawColumn> {
        let col = self
            .column(name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        if col.role != role {
            return Err(Error::WrongRole {
                column: name.to_string(),
                expected: role.as_str(),
                actual: col.role.as_str(),
            });
        }
        Ok(col)
    }

    /// Keeps the listed rows, in the listed order.
    pub fn select_rows(&self, keep: &[usize]) -> RawTable {
        let columns = self
            .columns
            .iter()
            .map(|c| RawColumn {
                name: c.name.clone(),
                role: c.role,
                cells: keep.iter().map(|&i| c.cells[i].clone()).collect(),
            })
            .collect();
        RawTable {
            columns,
            n_rows: keep.len(),
        }
    }

    pub fn push_column(&mut self, column: RawColumn) -> Result<()> {
        if self.column(&column.name).is_some() {
            return Err(Error::DuplicateColumn(column.name));
        }
        if self.columns.is_empty() {
            self.n_rows = column.cells.len();
        } else if column.cells.len() != self.n_rows {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows,
                found: column.cells.len(),
            });
        }
        self.columns.push(column);
        Ok(())
    }
}
