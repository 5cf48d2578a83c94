use alloc::vec;
use alloc::vec::Vec;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::ridge::{weighted_r2, weighted_ridge};
use super::{Background, Explanation, Method, PerturbConfig, LIME_DEFAULT_SAMPLES};
use crate::linalg::{dot, Matrix};
use crate::models::Predictor;
use crate::rng::{rng_for, stream};
use crate::{Error, Result};

/// LIME locality kernel `exp(−d² / width²)`.
#[inline]
pub fn lime_kernel(d2: f64, width: f64) -> f64 {
    libm::exp(-d2 / (width * width))
}

/// Local weighted-ridge surrogate around `instance`.
///
/// Continuous features get unit Gaussian noise; each one-hot group in the
/// background is replaced as a whole by the group values of a random
/// background row. Coefficients become the attributions, the intercept the
/// base value and the weighted R² the fidelity.
pub fn lime_explain<P: Predictor + ?Sized>(
    model: &P,
    instance: &[f64],
    bg: &Background,
    cfg: &PerturbConfig,
) -> Result<Explanation> {
    bg.check(model, instance)?;
    let m = instance.len();
    let n = cfg.sample_count.unwrap_or(LIME_DEFAULT_SAMPLES);
    if n < m + 2 {
        return Err(Error::SampleTooSmall(n));
    }
    let width = cfg.kernel_width.unwrap_or(0.75 * libm::sqrt(m as f64));
    if width.is_nan() || width <= 0.0 {
        return Err(Error::InvalidParameter("kernel width must be > 0".into()));
    }
    let mut grouped = vec![false; m];
    for g in &bg.groups {
        for &j in g {
            grouped[j] = true;
        }
    }
    let mut rng = rng_for(cfg.seed, stream::LIME, 0);
    let k = bg.rows.rows();
    let mut design = Matrix::zeros(n, m + 1);
    let mut weights = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    let mut z = vec![0.0; m];
    for s in 0..n {
        for j in 0..m {
            z[j] = if grouped[j] {
                instance[j]
            } else {
                instance[j] + Distribution::<f64>::sample(&StandardNormal, &mut rng)
            };
        }
        for g in &bg.groups {
            let donor = bg.rows.row(rng.random_range(0..k));
            for &j in g {
                z[j] = donor[j];
            }
        }
        let d2: f64 = z.iter().zip(instance).map(|(a, b)| (a - b) * (a - b)).sum();
        weights.push(lime_kernel(d2, width));
        targets.push(model.predict_row(&z));
        let row = design.row_mut(s);
        row[0] = 1.0;
        row[1..].copy_from_slice(&z);
    }
    let first = design.row(0).to_vec();
    if design.iter_rows().all(|r| r == first.as_slice()) {
        return Err(Error::DegenerateDesign);
    }
    let beta = weighted_ridge(&design, &targets, &weights, cfg.ridge_lambda)?;
    let fitted: Vec<f64> = design.iter_rows().map(|r| dot(r, &beta)).collect();
    let (r2, degenerate) = weighted_r2(&targets, &fitted, &weights);
    Ok(Explanation {
        method: Method::Lime,
        seed: cfg.seed,
        base_value: beta[0],
        prediction: model.predict_row(instance),
        attributions: bg.attributions(&beta[1..]),
        fidelity: Some(r2),
        degenerate,
        top_k: cfg.top_k,
        instance: None,
    })
}
