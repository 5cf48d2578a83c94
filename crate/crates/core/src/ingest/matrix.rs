use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::table::{ColumnRole, RawTable};
use crate::linalg::Matrix;
use crate::{Error, Result};

/// Fitted z-score parameters (population standard deviation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub mean: f64,
    pub std: f64,
}

impl Scaling {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }

    #[inline]
    pub fn invert(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ColumnKind {
    Continuous,
    Indicator { level: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    /// Raw column this feature was derived from.
    pub source: String,
    pub kind: ColumnKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<Scaling>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum DropReason {
    ZeroVariance,
    Collinear { with: String, rho: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedColumn {
    pub name: String,
    #[serde(flatten)]
    pub reason: DropReason,
}

/// Numeric design matrix with column metadata and the binary target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub values: Matrix,
    pub columns: Vec<FeatureColumn>,
    pub target: Vec<u8>,
    /// Optional per-row identifiers (empty, or one per row).
    #[serde(default)]
    pub row_ids: Vec<String>,
    /// Columns removed on the way here, in removal order.
    #[serde(default)]
    pub dropped: Vec<DroppedColumn>,
}

impl FeatureMatrix {
    pub fn new(values: Matrix, columns: Vec<FeatureColumn>, target: Vec<u8>) -> Result<Self> {
        let m = FeatureMatrix {
            values,
            columns,
            target,
            row_ids: Vec::new(),
            dropped: Vec::new(),
        };
        m.validate()?;
        Ok(m)
    }

    /// Shorthand for tests and synthetic data: continuous columns with the given names.
    pub fn from_continuous(values: Matrix, names: &[&str], target: Vec<u8>) -> Result<Self> {
        let columns = names
            .iter()
            .map(|n| FeatureColumn {
                name: n.to_string(),
                source: n.to_string(),
                kind: ColumnKind::Continuous,
                scaling: None,
            })
            .collect();
        FeatureMatrix::new(values, columns, target)
    }

    pub fn validate(&self) -> Result<()> {
        if self.columns.len() != self.values.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.values.cols(),
                found: self.columns.len(),
            });
        }
        if self.target.len() != self.values.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.values.rows(),
                found: self.target.len(),
            });
        }
        if !self.row_ids.is_empty() && self.row_ids.len() != self.values.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.values.rows(),
                found: self.row_ids.len(),
            });
        }
        if self.target.iter().any(|&y| y > 1) {
            return Err(Error::InvalidParameter("target must be 0/1".into()));
        }
        if self.values.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.cols()
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.name.clone()).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn select_rows(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            values: self.values.select_rows(idx),
            columns: self.columns.clone(),
            target: idx.iter().map(|&i| self.target[i]).collect(),
            row_ids: if self.row_ids.is_empty() {
                Vec::new()
            } else {
                idx.iter().map(|&i| self.row_ids[i].clone()).collect()
            },
            dropped: self.dropped.clone(),
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            values: self.values.select_cols(idx),
            columns: idx.iter().map(|&i| self.columns[i].clone()).collect(),
            target: self.target.clone(),
            row_ids: self.row_ids.clone(),
            dropped: self.dropped.clone(),
        }
    }

    /// Index groups of one-hot indicators sharing a source column. Continuous
    /// columns are not included.
    pub fn indicator_groups(&self) -> Vec<Vec<usize>> {
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, c) in self.columns.iter().enumerate() {
            if let ColumnKind::Indicator { .. } = c.kind {
                match groups.iter_mut().find(|(s, _)| *s == c.source) {
                    Some((_, g)) => g.push(i),
                    None => groups.push((c.source.clone(), alloc::vec![i])),
                }
            }
        }
        groups.into_iter().map(|(_, g)| g).collect()
    }

    pub fn positive_rate(&self) -> f64 {
        if self.target.is_empty() {
            return 0.0;
        }
        self.target.iter().map(|&y| y as f64).sum::<f64>() / self.target.len() as f64
    }

    /// Numeric matrix from the continuous and indicator columns of a table.
    /// Indicator names are `source=level`. Every cell must parse as a finite number.
    pub fn from_table(table: &RawTable, target: Vec<u8>) -> Result<Self> {
        let feature_cols: Vec<_> = table
            .columns()
            .iter()
            .filter(|c| matches!(c.role, ColumnRole::Continuous | ColumnRole::Indicator))
            .collect();
        let n = table.n_rows();
        let mut values = Matrix::zeros(n, feature_cols.len());
        let mut columns = Vec::with_capacity(feature_cols.len());
        for (j, col) in feature_cols.iter().enumerate() {
            for (i, cell) in col.cells.iter().enumerate() {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        row: i,
                        column: col.name.clone(),
                        value: cell.clone(),
                        what: "number",
                    })?;
                values.set(i, j, v);
            }
            let (source, kind) = match col.role {
                ColumnRole::Indicator => {
                    let (src, level) = col.name.split_once('=').unwrap_or((&col.name, ""));
                    (
                        src.to_string(),
                        ColumnKind::Indicator {
                            level: level.to_string(),
                        },
                    )
                }
                _ => (col.name.clone(), ColumnKind::Continuous),
            };
            columns.push(FeatureColumn {
                name: col.name.clone(),
                source,
                kind,
                scaling: None,
            });
        }
        FeatureMatrix::new(values, columns, target)
    }
}
