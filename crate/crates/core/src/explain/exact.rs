use alloc::vec;
use alloc::vec::Vec;

use super::{coalition_value, Background, Explanation, Method};
use crate::models::Predictor;
use crate::{Error, Result};

/// Largest feature count accepted by [`exact_shapley`] (2^m coalition values).
pub const EXACT_LIMIT: usize = 15;

/// Binomial coefficient as `f64`.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `s! (m − s − 1)! / m!`, the weight of a coalition of size `s` not containing the feature.
pub fn shapley_weight(m: usize, s: usize) -> f64 {
    1.0 / (m as f64 * binomial(m - 1, s))
}

/// Exact Shapley values by enumerating all `2^m` background-averaged
/// coalition values.
pub fn exact_shapley<P: Predictor + ?Sized>(model: &P, instance: &[f64], bg: &Background) -> Result<Explanation> {
    bg.check(model, instance)?;
    let m = instance.len();
    if m > EXACT_LIMIT {
        return Err(Error::TooManyFeatures {
            features: m,
            limit: EXACT_LIMIT,
        });
    }
    let full = (1usize << m) - 1;
    let prediction = model.predict_row(instance);
    let mut values = vec![0.0; full + 1];
    let mut present = vec![false; m];
    let mut buf = Vec::with_capacity(m);
    for (mask, v) in values.iter_mut().enumerate() {
        if mask == full {
            *v = prediction;
            continue;
        }
        for (j, p) in present.iter_mut().enumerate() {
            *p = mask & (1 << j) != 0;
        }
        *v = coalition_value(model, instance, bg, &present, &mut buf);
    }
    let weights: Vec<f64> = (0..m).map(|s| shapley_weight(m, s)).collect();
    let phi: Vec<f64> = (0..m)
        .map(|i| {
            let bit = 1usize << i;
            (0..=full)
                .filter(|mask| mask & bit == 0)
                .map(|mask| weights[mask.count_ones() as usize] * (values[mask | bit] - values[mask]))
                .sum()
        })
        .collect();
    Ok(Explanation {
        method: Method::ExactShapley,
        seed: 0,
        base_value: values[0],
        prediction,
        attributions: bg.attributions(&phi),
        fidelity: None,
        degenerate: false,
        top_k: m,
        instance: None,
    })
}
