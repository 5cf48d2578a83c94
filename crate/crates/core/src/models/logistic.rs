//! L2-regularised logistic regression trained by full-batch gradient descent.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{bce_with_logit, require_both_classes, sigmoid};
use crate::ingest::FeatureMatrix;
use crate::linalg::dot;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub l2: f64,
    pub max_epochs: usize,
    /// Stop once every gradient component is below this in magnitude.
    pub tolerance: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            learning_rate: 0.1,
            l2: 1e-4,
            max_epochs: 500,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: LogisticConfig,
    pub epochs_run: usize,
    pub final_loss: f64,
}

impl LogisticModel {
    /// Untrained model with all parameters zero (predicts 0.5 everywhere).
    pub fn zeros(m: usize) -> Self {
        LogisticModel {
            weights: vec![0.0; m],
            bias: 0.0,
            config: LogisticConfig::default(),
            epochs_run: 0,
            final_loss: f64::NAN,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.len() + 1
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    pub fn predict_row(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }
}

pub fn train_logistic(train: &FeatureMatrix, cfg: &LogisticConfig) -> Result<LogisticModel> {
    require_both_classes(&train.target)?;
    let n = train.n_rows();
    let m = train.n_cols();
    let inv_n = 1.0 / n as f64;
    let mut model = LogisticModel::zeros(m);
    model.config = *cfg;
    let mut grad_w = vec![0.0; m];
    for epoch in 0..cfg.max_epochs {
        grad_w.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        let mut loss = 0.0;
        for (r, &label) in train.target.iter().enumerate() {
            let x = train.values.row(r);
            let z = model.logit(x);
            let y = label as f64;
            loss += bce_with_logit(z, y);
            let err = sigmoid(z) - y;
            grad_b += err;
            for (g, xi) in grad_w.iter_mut().zip(x) {
                *g += err * xi;
            }
        }
        let penalty: f64 = model.weights.iter().map(|w| w * w).sum::<f64>() * 0.5 * cfg.l2;
        loss = loss * inv_n + penalty;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss(epoch));
        }
        model.final_loss = loss;
        model.epochs_run = epoch + 1;
        grad_b *= inv_n;
        let mut max_grad = grad_b.abs();
        for (g, w) in grad_w.iter_mut().zip(&model.weights) {
            *g = *g * inv_n + cfg.l2 * w;
            max_grad = max_grad.max(g.abs());
        }
        if max_grad < cfg.tolerance {
            break;
        }
        for (w, g) in model.weights.iter_mut().zip(&grad_w) {
            *w -= cfg.learning_rate * g;
        }
        model.bias -= cfg.learning_rate * grad_b;
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::metrics::roc_auc;

    fn separable_1d() -> FeatureMatrix {
        // x in ±[1, 3], label = x > 0
        let xs: Vec<f64> = (0..200)
            .map(|i| {
                let mag = 1.0 + (i / 2) as f64 / 50.0;
                if i % 2 == 0 { -mag } else { mag }
            })
            .collect();
        let target = xs.iter().map(|&x| (x > 0.0) as u8).collect();
        FeatureMatrix::from_continuous(Matrix::from_vec(200, 1, xs).unwrap(), &["x"], target).unwrap()
    }

    #[test]
    fn separable_toy_reaches_high_auc() {
        let data = separable_1d();
        let m = train_logistic(&data, &LogisticConfig::default()).unwrap();
        let scores: Vec<f64> = data.values.iter_rows().map(|r| m.predict_row(r)).collect();
        assert!(roc_auc(&data.target, &scores).unwrap() >= 0.99);
        assert!(m.weights[0] > 0.0);
    }

    #[test]
    fn deterministic() {
        let data = separable_1d();
        let a = train_logistic(&data, &LogisticConfig::default()).unwrap();
        let b = train_logistic(&data, &LogisticConfig::default()).unwrap();
        assert_eq!(a.weights[0].to_bits(), b.weights[0].to_bits());
        assert_eq!(a.bias.to_bits(), b.bias.to_bits());
    }

    #[test]
    fn single_class_rejected() {
        let data = FeatureMatrix::from_continuous(
            Matrix::from_vec(3, 1, vec![1.0, 2.0, 3.0]).unwrap(),
            &["x"],
            vec![1, 1, 1],
        )
        .unwrap();
        assert_eq!(train_logistic(&data, &LogisticConfig::default()), Err(Error::SingleClass));
    }

    #[test]
    fn zero_model_predicts_half() {
        let m = LogisticModel::zeros(3);
        assert_eq!(m.predict_row(&[5.0, -2.0, 9.0]), 0.5);
        assert_eq!(m.parameter_count(), 4);
    }

    #[test]
    fn monotone_in_positive_weight() {
        let m = LogisticModel {
            weights: vec![0.7, -0.2],
            ..LogisticModel::zeros(2)
        };
        let mut prev = m.predict_row(&[-5.0, 1.0]);
        for i in -49..=50 {
            let p = m.predict_row(&[i as f64 / 10.0, 1.0]);
            assert!(p > prev);
            prev = p;
        }
    }
}
