//! Feed-forward network `m → 64 → 32 → 16 → 1` with ReLU hidden units, a
//! sigmoid output, inverted dropout, Adam and early stopping on validation loss.

use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{bce_with_logit, require_both_classes, sigmoid};
use crate::ingest::{stratified_indices, FeatureMatrix};
use crate::linalg::{dot, Matrix};
use crate::rng::{derive_seed, rng_for, stream};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    /// Dropout rate applied after each hidden layer's activation (0 = none).
    pub dropout: Vec<f64>,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub validation_fraction: f64,
    pub patience: usize,
    pub min_delta: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: vec![64, 32, 16],
            dropout: vec![0.3, 0.2, 0.0],
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 256,
            max_epochs: 100,
            validation_fraction: 0.1,
            patience: 5,
            min_delta: 0.0,
        }
    }
}

impl MlpConfig {
    fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidParameter(s.into()));
        if self.patience < 1 {
            return bad("patience must be ≥ 1");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation fraction must be in (0, 1)");
        }
        if self.dropout.len() != self.hidden.len() {
            return bad("one dropout rate per hidden layer");
        }
        if self.dropout.iter().any(|&r| !(0.0..1.0).contains(&r)) {
            return bad("dropout rates must be in [0, 1)");
        }
        if self.batch_size == 0 || self.hidden.contains(&0) {
            return bad("batch size and layer widths must be positive");
        }
        Ok(())
    }
}

/// Fully connected layer; `w` is `n_out × n_in`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Dense {
    fn forward(&self, a: &[f64], z: &mut [f64]) {
        for (i, zi) in z.iter_mut().enumerate() {
            *zi = self.b[i] + dot(&self.w[i * self.n_in..(i + 1) * self.n_in], a);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<Dense>,
    pub dropout: Vec<f64>,
    pub config: MlpConfig,
    /// Epochs actually trained (≤ `max_epochs`).
    pub epochs_run: usize,
    /// Zero-based epoch whose weights these are.
    pub best_epoch: usize,
    pub history: Vec<EpochLog>,
}

/// Per-sample forward state kept for backprop.
struct Trace {
    /// Input to each layer (post-activation, post-dropout of the previous one).
    inputs: Vec<Vec<f64>>,
    /// Hidden pre-activations.
    pre: Vec<Vec<f64>>,
    masks: Vec<Vec<f64>>,
    deltas: Vec<Vec<f64>>,
}

impl MlpModel {
    /// Glorot-uniform weights, zero biases.
    pub fn init(n_in: usize, cfg: &MlpConfig, seed: u64) -> Self {
        let mut rng = rng_for(seed, stream::MLP_INIT, 0);
        let mut widths = vec![n_in];
        widths.extend_from_slice(&cfg.hidden);
        widths.push(1);
        let layers = widths
            .windows(2)
            .map(|w| {
                let (n_in, n_out) = (w[0], w[1]);
                let limit = libm::sqrt(6.0 / (n_in + n_out) as f64);
                Dense {
                    n_in,
                    n_out,
                    w: (0..n_in * n_out)
                        .map(|_| rng.random_range(-limit..limit))
                        .collect(),
                    b: vec![0.0; n_out],
                }
            })
            .collect();
        MlpModel {
            layers,
            dropout: cfg.dropout.clone(),
            config: cfg.clone(),
            epochs_run: 0,
            best_epoch: 0,
            history: Vec::new(),
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    /// Output logit; no dropout.
    pub fn logit(&self, x: &[f64]) -> f64 {
        let mut a = x.to_vec();
        let mut z = Vec::new();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            z.clear();
            z.resize(layer.n_out, 0.0);
            layer.forward(&a, &mut z);
            if l < last {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            core::mem::swap(&mut a, &mut z);
        }
        a[0]
    }

    pub fn predict_row(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    /// Mean binary cross-entropy over the rows, no dropout.
    pub fn loss(&self, x: &Matrix, y: &[u8]) -> f64 {
        let total: f64 = x
            .iter_rows()
            .zip(y)
            .map(|(r, &t)| bce_with_logit(self.logit(r), t as f64))
            .sum();
        total / y.len().max(1) as f64
    }

    fn new_trace(&self) -> Trace {
        let hidden = self.layers.len() - 1;
        Trace {
            inputs: self.layers.iter().map(|l| vec![0.0; l.n_in]).collect(),
            pre: self.layers[..hidden].iter().map(|l| vec![0.0; l.n_out]).collect(),
            masks: self.layers[..hidden].iter().map(|l| vec![1.0; l.n_out]).collect(),
            deltas: self.layers.iter().map(|l| vec![0.0; l.n_out]).collect(),
        }
    }

    /// Forward + backward for one sample, adding parameter gradients into
    /// `grad` (flat, same order as [`MlpModel::params`]). Uses whatever masks
    /// are currently in `trace`. Returns the sample loss.
    fn accumulate(&self, x: &[f64], y: f64, trace: &mut Trace, grad: &mut [f64]) -> f64 {
        let last = self.layers.len() - 1;
        trace.inputs[0].copy_from_slice(x);
        let mut out_logit = 0.0;
        for (l, layer) in self.layers.iter().enumerate() {
            if l < last {
                let (inp, rest) = trace.inputs.split_at_mut(l + 1);
                let z = &mut trace.pre[l];
                layer.forward(&inp[l], z);
                let next = &mut rest[0];
                for ((a, &zv), &m) in next.iter_mut().zip(z.iter()).zip(&trace.masks[l]) {
                    *a = zv.max(0.0) * m;
                }
            } else {
                let mut z = [0.0];
                layer.forward(&trace.inputs[l], &mut z);
                out_logit = z[0];
            }
        }
        let loss = bce_with_logit(out_logit, y);
        trace.deltas[last][0] = sigmoid(out_logit) - y;

        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut off = 0;
        for layer in &self.layers {
            offsets.push(off);
            off += layer.w.len() + layer.b.len();
        }
        for l in (0..=last).rev() {
            let layer = &self.layers[l];
            let base = offsets[l];
            {
                let delta = &trace.deltas[l];
                let input = &trace.inputs[l];
                for (i, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let row = &mut grad[base + i * layer.n_in..base + (i + 1) * layer.n_in];
                    for (g, a) in row.iter_mut().zip(input) {
                        *g += d * a;
                    }
                    grad[base + layer.w.len() + i] += d;
                }
            }
            if l > 0 {
                let (lower, upper) = trace.deltas.split_at_mut(l);
                let delta = &upper[0];
                let prev = &mut lower[l - 1];
                prev.iter_mut().for_each(|v| *v = 0.0);
                for (i, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let row = &layer.w[i * layer.n_in..(i + 1) * layer.n_in];
                    for (p, w) in prev.iter_mut().zip(row) {
                        *p += d * w;
                    }
                }
                for ((p, &z), &m) in prev.iter_mut().zip(&trace.pre[l - 1]).zip(&trace.masks[l - 1]) {
                    *p = if z > 0.0 { *p * m } else { 0.0 };
                }
            }
        }
        loss
    }

    /// Mean loss and its exact gradient over the rows, no dropout.
    pub fn loss_and_gradient(&self, x: &Matrix, y: &[u8]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.parameter_count()];
        let mut trace = self.new_trace();
        let mut loss = 0.0;
        for (r, &t) in x.iter_rows().zip(y) {
            loss += self.accumulate(r, t as f64, &mut trace, &mut grad);
        }
        let inv = 1.0 / y.len().max(1) as f64;
        grad.iter_mut().for_each(|g| *g *= inv);
        (loss * inv, grad)
    }

    /// All parameters flattened layer by layer: weights then biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.parameter_count());
        for l in &self.layers {
            p.extend_from_slice(&l.w);
            p.extend_from_slice(&l.b);
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.parameter_count());
        let mut off = 0;
        for l in &mut self.layers {
            let nw = l.w.len();
            l.w.copy_from_slice(&p[off..off + nw]);
            off += nw;
            let nb = l.b.len();
            l.b.copy_from_slice(&p[off..off + nb]);
            off += nb;
        }
    }

    fn apply_update(&mut self, update: &[f64]) {
        let mut off = 0;
        for l in &mut self.layers {
            for w in l.w.iter_mut().chain(l.b.iter_mut()) {
                *w -= update[off];
                off += 1;
            }
        }
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    step: Vec<f64>,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            step: vec![0.0; n],
        }
    }

    fn step(&mut self, grad: &[f64], cfg: &MlpConfig) -> &[f64] {
        self.t += 1;
        let bc1 = 1.0 - libm::pow(cfg.beta1, self.t as f64);
        let bc2 = 1.0 - libm::pow(cfg.beta2, self.t as f64);
        for (((&g, m), v), step) in grad.iter().zip(&mut self.m).zip(&mut self.v).zip(&mut self.step) {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            *step = cfg.learning_rate * (*m / bc1) / (libm::sqrt(*v / bc2) + cfg.epsilon);
        }
        &self.step
    }
}

/// Trains for at most `epochs` epochs without early stopping or validation
/// split. Used to reach a mid-training state for gradient checks.
pub fn train_mlp_epochs(train: &FeatureMatrix, cfg: &MlpConfig, seed: u64, epochs: usize) -> Result<MlpModel> {
    cfg.validate()?;
    let rows: Vec<usize> = (0..train.n_rows()).collect();
    let mut model = MlpModel::init(train.n_cols(), cfg, seed);
    let mut adam = Adam::new(model.parameter_count());
    for epoch in 0..epochs {
        run_epoch(&mut model, &mut adam, train, &rows, cfg, seed, epoch)?;
        model.epochs_run = epoch + 1;
        model.best_epoch = epoch;
    }
    Ok(model)
}

fn run_epoch(
    model: &mut MlpModel,
    adam: &mut Adam,
    train: &FeatureMatrix,
    rows: &[usize],
    cfg: &MlpConfig,
    seed: u64,
    epoch: usize,
) -> Result<f64> {
    let mut order = rows.to_vec();
    order.shuffle(&mut rng_for(seed, stream::MLP_SHUFFLE, epoch as u64));
    let mut grad = vec![0.0; model.parameter_count()];
    let mut trace = model.new_trace();
    let mut total = 0.0;
    for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
        let mut rng = rng_for(
            derive_seed(seed, stream::MLP_DROPOUT, epoch as u64),
            stream::MLP_DROPOUT,
            b as u64,
        );
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut batch_loss = 0.0;
        for &r in batch {
            for (mask, &rate) in trace.masks.iter_mut().zip(&model.dropout) {
                if rate > 0.0 {
                    let keep = 1.0 / (1.0 - rate);
                    for m in mask.iter_mut() {
                        *m = if rng.random::<f64>() >= rate { keep } else { 0.0 };
                    }
                }
            }
            batch_loss += model.accumulate(train.values.row(r), train.target[r] as f64, &mut trace, &mut grad);
        }
        if !batch_loss.is_finite() {
            return Err(Error::NonFiniteLoss(epoch));
        }
        total += batch_loss;
        let inv = 1.0 / batch.len() as f64;
        grad.iter_mut().for_each(|g| *g *= inv);
        let update = adam.step(&grad, cfg);
        model.apply_update(update);
    }
    Ok(total / rows.len().max(1) as f64)
}

/// Mini-batch Adam with early stopping; returns the best-validation checkpoint.
pub fn train_mlp(train: &FeatureMatrix, cfg: &MlpConfig, seed: u64) -> Result<MlpModel> {
    cfg.validate()?;
    require_both_classes(&train.target)?;
    let n = train.n_rows();
    let needed = libm::ceil(10.0 / cfg.validation_fraction) as usize;
    if n < needed {
        return Err(Error::SampleTooSmall(n));
    }
    let (fit_rows, val_rows) = stratified_indices(
        &train.target,
        1.0 - cfg.validation_fraction,
        derive_seed(seed, stream::MLP_VALIDATION, 0),
    )?;
    let val_x = train.values.select_rows(&val_rows);
    let val_y: Vec<u8> = val_rows.iter().map(|&r| train.target[r]).collect();

    let mut model = MlpModel::init(train.n_cols(), cfg, seed);
    let mut adam = Adam::new(model.parameter_count());
    let mut best = model.clone();
    let mut best_val = f64::INFINITY;
    let mut history = Vec::new();
    let mut wait = 0;
    for epoch in 0..cfg.max_epochs {
        let train_loss = run_epoch(&mut model, &mut adam, train, &fit_rows, cfg, seed, epoch)?;
        let val_loss = model.loss(&val_x, &val_y);
        if !val_loss.is_finite() {
            return Err(Error::NonFiniteLoss(epoch));
        }
        history.push(EpochLog { train_loss, val_loss });
        if val_loss < best_val - cfg.min_delta {
            best_val = val_loss;
            best = model.clone();
            best.best_epoch = epoch;
            wait = 0;
        } else {
            wait += 1;
            if wait >= cfg.patience {
                break;
            }
        }
    }
    best.epochs_run = history.len();
    best.history = history;
    Ok(best)
}
