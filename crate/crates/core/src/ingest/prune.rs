//! Greedy keep-first collinearity pruning.

use alloc::vec::Vec;

use super::matrix::{DropReason, DroppedColumn, FeatureMatrix};
use super::standardize::column_moments;
use crate::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.85;

/// Pearson correlation of two columns over `rows`; 0 if either is constant.
pub fn pearson(m: &FeatureMatrix, a: usize, b: usize, rows: &[usize]) -> f64 {
    let (ma, sa) = column_moments(m, a, rows);
    let (mb, sb) = column_moments(m, b, rows);
    if sa == 0.0 || sb == 0.0 {
        return 0.0;
    }
    let cov = rows
        .iter()
        .map(|&r| (m.values.get(r, a) - ma) * (m.values.get(r, b) - mb))
        .sum::<f64>()
        / rows.len() as f64;
    (cov / (sa * sb)).clamp(-1.0, 1.0)
}

/// Scans columns in order; a column whose |ρ| with any already-kept column
/// exceeds `threshold` is dropped. Correlations are computed over `rows`.
pub fn collinear_drops(
    matrix: &FeatureMatrix,
    rows: &[usize],
    threshold: f64,
) -> Result<Vec<DroppedColumn>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "collinearity threshold {threshold} not in (0, 1]"
        )));
    }
    let mut kept: Vec<usize> = Vec::new();
    let mut drops = Vec::new();
    for c in 0..matrix.n_cols() {
        let hit = kept.iter().find_map(|&k| {
            let rho = pearson(matrix, k, c, rows);
            (rho.abs() > threshold).then_some((k, rho))
        });
        match hit {
            Some((k, rho)) => drops.push(DroppedColumn {
                name: matrix.columns[c].name.clone(),
                reason: DropReason::Collinear {
                    with: matrix.columns[k].name.clone(),
                    rho,
                },
            }),
            None => kept.push(c),
        }
    }
    Ok(drops)
}

/// Removes the named drops from a matrix and records them in its provenance.
pub fn apply_drops(matrix: &FeatureMatrix, drops: &[DroppedColumn]) -> FeatureMatrix {
    let keep: Vec<usize> = (0..matrix.n_cols())
        .filter(|&c| !drops.iter().any(|d| d.name == matrix.columns[c].name))
        .collect();
    let mut out = matrix.select_columns(&keep);
    out.dropped.extend(
        drops
            .iter()
            .filter(|d| matrix.column_index(&d.name).is_some())
            .cloned(),
    );
    out
}

pub fn prune_collinear(matrix: &FeatureMatrix, threshold: f64) -> Result<FeatureMatrix> {
    let rows: Vec<usize> = (0..matrix.n_rows()).collect();
    let drops = collinear_drops(matrix, &rows, threshold)?;
    Ok(apply_drops(matrix, &drops))
}
