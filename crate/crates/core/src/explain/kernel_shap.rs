use alloc::vec;
use alloc::vec::Vec;
use rand::seq::index::sample;
use rand::Rng as _;

use super::exact::binomial;
use super::{coalition_value, Background, Explanation, Method, PerturbConfig, SHAP_MAX_DEFAULT_COALITIONS};
use crate::linalg::{weighted_normal_solve, Matrix};
use crate::models::Predictor;
use crate::rng::{rng_for, stream};
use crate::{Error, Result};

/// Shapley kernel `(m − 1) / (C(m, s) · s · (m − s))` for `0 < s < m`.
pub fn shap_kernel_weight(m: usize, s: usize) -> Result<f64> {
    if s == 0 || s >= m {
        return Err(Error::InvalidParameter(alloc::format!(
            "coalition size {s} must satisfy 0 < s < {m}"
        )));
    }
    Ok((m - 1) as f64 / (binomial(m, s) * s as f64 * (m - s) as f64))
}

/// Coalitions as bitmasks with regression weights.
struct Coalitions {
    masks: Vec<u64>,
    weights: Vec<f64>,
}

impl Coalitions {
    fn push(&mut self, mask: u64, w: f64) {
        self.masks.push(mask);
        self.weights.push(w);
    }

    fn enumerate_all(m: usize) -> Result<Self> {
        let mut c = Coalitions {
            masks: Vec::new(),
            weights: Vec::new(),
        };
        for mask in 1..((1u64 << m) - 1) {
            c.push(mask, shap_kernel_weight(m, mask.count_ones() as usize)?);
        }
        Ok(c)
    }

    /// Budgeted scheme: whole coalition sizes (paired with their complements)
    /// are enumerated while the budget's share for them covers every subset;
    /// the rest is sampled by size from the remaining kernel mass, with
    /// complements added alongside, and repeats accumulate weight.
    fn sampled(m: usize, budget: usize, seed: u64) -> Self {
        let mut c = Coalitions {
            masks: Vec::new(),
            weights: Vec::new(),
        };
        let all = if m >= 64 { u64::MAX } else { (1u64 << m) - 1 };
        // sizes 1..=ceil((m-1)/2); sizes below m/2 are paired with m - s
        let n_sizes = (m - 1).div_ceil(2);
        let n_paired = (m - 1) / 2;
        let mut size_w: Vec<f64> = (1..=n_sizes)
            .map(|s| (m - 1) as f64 / (s as f64 * (m - s) as f64))
            .collect();
        for w in size_w.iter_mut().take(n_paired) {
            *w *= 2.0;
        }
        let total: f64 = size_w.iter().sum();
        size_w.iter_mut().for_each(|w| *w /= total);

        let mut left = budget as f64;
        let mut remaining = size_w.clone();
        let mut full_sizes = 0;
        for s in 1..=n_sizes {
            let paired = s <= n_paired;
            let n_subsets = binomial(m, s) * if paired { 2.0 } else { 1.0 };
            if left * remaining[s - 1] / n_subsets < 1.0 - 1e-8 {
                break;
            }
            full_sizes += 1;
            left -= n_subsets;
            if remaining[s - 1] < 1.0 {
                let scale = 1.0 - remaining[s - 1];
                remaining.iter_mut().for_each(|w| *w /= scale);
            }
            let w = size_w[s - 1] / binomial(m, s) / if paired { 2.0 } else { 1.0 };
            for_each_subset(m, s, |mask| {
                c.push(mask, w);
                if paired {
                    c.push(all & !mask, w);
                }
            });
        }
        let fixed = c.masks.len();
        let mut samples_left = budget.saturating_sub(fixed);
        if full_sizes < n_sizes && samples_left > 0 {
            let mut rest: Vec<f64> = size_w.clone();
            for w in rest.iter_mut().take(n_paired) {
                *w /= 2.0;
            }
            let rest = &rest[full_sizes..];
            let rest_total: f64 = rest.iter().sum();
            let mut rng = rng_for(seed, stream::KERNEL_SHAP, 0);
            let mut seen: alloc::collections::BTreeMap<u64, usize> = alloc::collections::BTreeMap::new();
            let mut draws = 0;
            while samples_left > 0 && draws < 4 * budget {
                draws += 1;
                let u: f64 = rng.random::<f64>() * rest_total;
                let mut acc = 0.0;
                let mut pick = rest.len() - 1;
                for (i, w) in rest.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                let s = pick + full_sizes + 1;
                let mask = sample(&mut rng, m, s).iter().fold(0u64, |acc, j| acc | (1 << j));
                let paired = s <= n_paired;
                match seen.get(&mask) {
                    Some(&at) => {
                        c.weights[at] += 1.0;
                        if paired {
                            c.weights[at + 1] += 1.0;
                        }
                    }
                    None => {
                        seen.insert(mask, c.masks.len());
                        c.push(mask, 1.0);
                        samples_left -= 1;
                        if paired {
                            // complement always follows its mask, even past the budget by one
                            c.push(all & !mask, 1.0);
                            samples_left = samples_left.saturating_sub(1);
                        }
                    }
                }
            }
            let weight_left: f64 = size_w[full_sizes..].iter().sum();
            let sampled: f64 = c.weights[fixed..].iter().sum();
            if sampled > 0.0 {
                c.weights[fixed..].iter_mut().for_each(|w| *w *= weight_left / sampled);
            }
        }
        c
    }
}

/// Calls `f` with every `s`-subset of `0..m` as a bitmask, in lexicographic order.
fn for_each_subset(m: usize, s: usize, mut f: impl FnMut(u64)) {
    let mut idx: Vec<usize> = (0..s).collect();
    loop {
        f(idx.iter().fold(0u64, |acc, &j| acc | (1 << j)));
        let mut i = s;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - s {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..s {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Kernel SHAP with the efficiency constraint `Σφ = f(x) − base` enforced by
/// eliminating the last feature's unknown.
///
/// With `m ≤ cfg.enumerate_limit` every proper, non-empty coalition is used
/// with its exact kernel weight and the result equals the exact Shapley
/// values; otherwise `cfg.sample_count` coalitions (default
/// `min(2^m − 2, 2048)`) are chosen by the budgeted scheme.
pub fn kernel_shap_explain<P: Predictor + ?Sized>(
    model: &P,
    instance: &[f64],
    bg: &Background,
    cfg: &PerturbConfig,
) -> Result<Explanation> {
    bg.check(model, instance)?;
    let m = instance.len();
    if m > 63 {
        return Err(Error::TooManyFeatures { features: m, limit: 63 });
    }
    let prediction = model.predict_row(instance);
    let mut buf = Vec::with_capacity(m);
    let base = coalition_value(model, instance, bg, &vec![false; m], &mut buf);
    let delta = prediction - base;
    let phi = if m == 0 {
        Vec::new()
    } else if m == 1 {
        vec![delta]
    } else {
        let proper = (1u64 << m) as f64 - 2.0;
        let enumerate = m <= cfg.enumerate_limit.min(30);
        let coalitions = if enumerate {
            Coalitions::enumerate_all(m)?
        } else {
            let budget = cfg
                .sample_count
                .unwrap_or_else(|| SHAP_MAX_DEFAULT_COALITIONS.min(proper as usize));
            if budget < m {
                return Err(Error::SampleTooSmall(budget));
            }
            Coalitions::sampled(m, budget, cfg.seed)
        };
        let last = m - 1;
        let mut design = Matrix::zeros(coalitions.masks.len(), last);
        let mut targets = Vec::with_capacity(coalitions.masks.len());
        let mut present = vec![false; m];
        for (r, &mask) in coalitions.masks.iter().enumerate() {
            for (j, p) in present.iter_mut().enumerate() {
                *p = mask & (1 << j) != 0;
            }
            let v = coalition_value(model, instance, bg, &present, &mut buf) - base;
            let z_last = present[last] as u8 as f64;
            let row = design.row_mut(r);
            for j in 0..last {
                row[j] = present[j] as u8 as f64 - z_last;
            }
            targets.push(v - z_last * delta);
        }
        let mut phi = weighted_normal_solve(&design, &targets, &coalitions.weights, &vec![0.0; last])?;
        let rest: f64 = phi.iter().sum();
        phi.push(delta - rest);
        phi
    };
    Ok(Explanation {
        method: Method::KernelShap,
        seed: cfg.seed,
        base_value: base,
        prediction,
        attributions: bg.attributions(&phi),
        fidelity: None,
        degenerate: false,
        top_k: cfg.top_k,
        instance: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::exact_shapley;
    use crate::models::FnModel;
    use alloc::string::String;

    fn names(m: usize) -> Vec<String> {
        (0..m).map(|i| alloc::format!("x{i}")).collect()
    }

    #[test]
    fn kernel_weight_values() {
        assert_eq!(shap_kernel_weight(4, 1).unwrap(), 0.25);
        assert_eq!(shap_kernel_weight(4, 2).unwrap(), 0.125);
        for m in 2..12 {
            for s in 1..m {
                assert_eq!(shap_kernel_weight(m, s).unwrap(), shap_kernel_weight(m, m - s).unwrap());
            }
        }
        assert!(shap_kernel_weight(4, 0).is_err());
        assert!(shap_kernel_weight(4, 4).is_err());
    }

    #[test]
    fn subsets_enumerated() {
        let mut v = Vec::new();
        for_each_subset(4, 2, |m| v.push(m));
        assert_eq!(v, vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
        let mut count = 0;
        for_each_subset(10, 3, |_| count += 1);
        assert_eq!(count, 120);
    }

    #[test]
    fn additive_model_with_zero_background() {
        let f = FnModel::new(2, |x: &[f64]| x[0] + x[1]);
        let bg = Background::new(Matrix::zeros(3, 2), names(2)).unwrap();
        let e = kernel_shap_explain(&f, &[1.0, 1.0], &bg, &PerturbConfig::default()).unwrap();
        assert!((e.attributions[0].weight - 1.0).abs() < 1e-12);
        assert!((e.attributions[1].weight - 1.0).abs() < 1e-12);
        assert_eq!(e.base_value, 0.0);
    }

    #[test]
    fn dummy_feature_gets_zero() {
        let f = FnModel::new(5, |x: &[f64]| x[0] * x[1] + libm::sin(x[3]) - x[4]);
        let bg = Background::new(
            Matrix::from_rows(&[vec![0.1, 0.2, 0.3, 0.4, 0.5], vec![-1.0, 0.0, 2.0, 1.0, -0.5]]).unwrap(),
            names(5),
        )
        .unwrap();
        let e = kernel_shap_explain(&f, &[1.0, -2.0, 3.0, 0.5, 0.25], &bg, &PerturbConfig::default()).unwrap();
        assert!(e.attributions[2].weight.abs() <= 1e-6);
        assert!(e.additivity_residual().abs() <= 1e-12);
    }

    #[test]
    fn matches_exact_under_enumeration() {
        let f = FnModel::new(6, |x: &[f64]| {
            1.0 / (1.0 + libm::exp(-(x[0] * x[1] - 0.5 * x[2] + x[3] * x[4] * x[5])))
        });
        let bg = Background::new(
            Matrix::from_rows(&[
                vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
                vec![-1.0, 0.0, 2.0, 1.0, -0.5, 0.3],
                vec![0.7, -0.7, 0.0, -1.2, 0.9, -0.1],
            ])
            .unwrap(),
            names(6),
        )
        .unwrap();
        let x = [1.0, -2.0, 0.4, 0.5, 0.25, -1.5];
        let k = kernel_shap_explain(&f, &x, &bg, &PerturbConfig::default()).unwrap();
        let e = exact_shapley(&f, &x, &bg).unwrap();
        for (a, b) in k.weights().iter().zip(e.weights()) {
            assert!((a - b).abs() <= 1e-6);
        }
        assert!((k.base_value - e.base_value).abs() < 1e-15);
    }

    #[test]
    fn sampled_budget_covering_everything_is_exact() {
        let f = FnModel::new(5, |x: &[f64]| x[0] * x[1] + x[2] * x[3] * x[4]);
        let bg = Background::new(Matrix::from_rows(&[vec![0.3, -0.2, 0.5, 1.0, -1.0]]).unwrap(), names(5)).unwrap();
        let x = [1.0, 2.0, -1.0, 0.5, 0.8];
        let cfg = PerturbConfig {
            enumerate_limit: 0,
            sample_count: Some(30),
            ..PerturbConfig::default()
        };
        let k = kernel_shap_explain(&f, &x, &bg, &cfg).unwrap();
        let e = exact_shapley(&f, &x, &bg).unwrap();
        for (a, b) in k.weights().iter().zip(e.weights()) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn sampled_is_efficient_and_deterministic() {
        let f = FnModel::new(10, |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * v * v).sum());
        let bg = Background::new(Matrix::zeros(2, 10), names(10)).unwrap();
        let x: Vec<f64> = (0..10).map(|i| 0.1 * i as f64 - 0.3).collect();
        let cfg = PerturbConfig {
            enumerate_limit: 0,
            sample_count: Some(200),
            ..PerturbConfig::default()
        };
        let a = kernel_shap_explain(&f, &x, &bg, &cfg).unwrap();
        let b = kernel_shap_explain(&f, &x, &bg, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.additivity_residual().abs() < 1e-9);
    }

    #[test]
    fn empty_background_rejected() {
        assert_eq!(Background::new(Matrix::zeros(0, 2), names(2)), Err(Error::EmptyBackground));
    }
}
