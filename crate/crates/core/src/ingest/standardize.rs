//! z-score standardization of continuous columns, with zero-variance removal.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::matrix::{ColumnKind, DropReason, DroppedColumn, FeatureMatrix, Scaling};
use crate::{Error, Result};

/// Population mean and standard deviation of column `c` over `rows`.
pub(crate) fn column_moments(m: &FeatureMatrix, c: usize, rows: &[usize]) -> (f64, f64) {
    if rows.is_empty() {
        return (0.0, 0.0);
    }
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&r| m.values.get(r, c)).sum::<f64>() / n;
    let var = rows
        .iter()
        .map(|&r| {
            let d = m.values.get(r, c) - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    (mean, libm::sqrt(var))
}

fn is_zero_variance(mean: f64, std: f64) -> bool {
    std <= 1e-12 * mean.abs().max(1.0)
}

/// Fitted standardization: which columns survive and how continuous ones scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    /// Surviving columns in order; `Some` scaling for continuous ones.
    pub kept: Vec<(String, Option<Scaling>)>,
    pub zero_variance: Vec<String>,
}

impl Standardizer {
    pub fn fit(matrix: &FeatureMatrix, fit_rows: &[usize]) -> Self {
        let mut kept = Vec::new();
        let mut zero_variance = Vec::new();
        for (c, col) in matrix.columns.iter().enumerate() {
            let (mean, std) = column_moments(matrix, c, fit_rows);
            if is_zero_variance(mean, std) {
                zero_variance.push(col.name.clone());
                continue;
            }
            let scaling = match col.kind {
                ColumnKind::Continuous => Some(Scaling { mean, std }),
                ColumnKind::Indicator { .. } => None,
            };
            kept.push((col.name.clone(), scaling));
        }
        Standardizer {
            kept,
            zero_variance,
        }
    }

    /// Drops zero-variance columns and rescales continuous ones using the fitted statistics.
    pub fn apply(&self, matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
        let mut idx = Vec::with_capacity(self.kept.len());
        let mut missing = Vec::new();
        for (name, _) in &self.kept {
            match matrix.column_index(name) {
                Some(i) => idx.push(i),
                None => missing.push(name.clone()),
            }
        }
        if !missing.is_empty() {
            return Err(Error::FeatureMismatch(missing));
        }
        let mut out = matrix.select_columns(&idx);
        for (c, (_, scaling)) in self.kept.iter().enumerate() {
            if let Some(s) = scaling {
                for r in 0..out.n_rows() {
                    let v = out.values.get(r, c);
                    out.values.set(r, c, s.apply(v));
                }
                out.columns[c].scaling = Some(*s);
            }
        }
        for name in &self.zero_variance {
            if matrix.column_index(name).is_some() {
                out.dropped.push(DroppedColumn {
                    name: name.clone(),
                    reason: DropReason::ZeroVariance,
                });
            }
        }
        Ok(out)
    }
}

/// Fits on `fit_rows` and standardizes the whole matrix.
pub fn standardize(matrix: &FeatureMatrix, fit_rows: &[usize]) -> Result<(FeatureMatrix, Standardizer)> {
    let s = Standardizer::fit(matrix, fit_rows);
    let out = s.apply(matrix)?;
    Ok((out, s))
}

/// Undoes the z-score on every column that carries scaling parameters.
pub fn inverse_standardize(matrix: &FeatureMatrix) -> FeatureMatrix {
    let mut out = matrix.clone();
    for (c, col) in matrix.columns.iter().enumerate() {
        if let Some(s) = col.scaling {
            for r in 0..out.n_rows() {
                let z = out.values.get(r, c);
                out.values.set(r, c, s.invert(z));
            }
            out.columns[c].scaling = None;
        }
    }
    out
}
