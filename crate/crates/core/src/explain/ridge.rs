use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{weighted_normal_solve, Matrix};
use crate::{Error, Result};

/// Weighted ridge regression. Column 0 of `design` is the intercept and is
/// not penalised; the remaining coefficients get `lambda · β²`.
///
/// A singular system at `lambda = 0` is [`Error::Singular`].
pub fn weighted_ridge(design: &Matrix, targets: &[f64], weights: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let p = design.cols();
    if p == 0 {
        return Err(Error::InvalidParameter("design has no columns".into()));
    }
    if design.rows() < p + 1 {
        return Err(Error::SampleTooSmall(design.rows()));
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidParameter("ridge lambda must be ≥ 0".into()));
    }
    if weights.iter().any(|&w| w.is_nan() || w < 0.0) || weights.iter().all(|&w| w == 0.0) {
        return Err(Error::InvalidParameter("sample weights must be ≥ 0 and not all zero".into()));
    }
    let mut penalty = vec![lambda; p];
    penalty[0] = 0.0;
    weighted_normal_solve(design, targets, weights, &penalty)
}

/// Weighted coefficient of determination. Returns `(r², degenerate)`; when
/// the targets have zero weighted variance the fit is called perfect.
pub fn weighted_r2(targets: &[f64], fitted: &[f64], weights: &[f64]) -> (f64, bool) {
    let wsum: f64 = weights.iter().sum();
    let mean = targets.iter().zip(weights).map(|(y, w)| y * w).sum::<f64>() / wsum;
    let mut ss_tot = 0.0;
    let mut ss_res = 0.0;
    for ((y, f), w) in targets.iter().zip(fitted).zip(weights) {
        ss_tot += w * (y - mean) * (y - mean);
        ss_res += w * (y - f) * (y - f);
    }
    let scale = wsum * mean.abs().max(1.0) * mean.abs().max(1.0);
    if ss_tot <= 1e-20 * scale {
        return (1.0, true);
    }
    (1.0 - ss_res / ss_tot, false)
}
