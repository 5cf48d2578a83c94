//! Random forest with class-balanced Gini splits.
//!
//! Each tree is grown on a bootstrap sample of size n. At every node
//! ⌈√m⌉ candidate features are tried (more are drawn only while the drawn
//! ones are constant in the node), and the split minimising the
//! class-weighted Gini impurity of the children wins. Class weights are
//! `w_c = n / (2 · n_c)` over the training set. A leaf stores the weighted
//! default fraction of its samples.

use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::require_both_classes;
use crate::ingest::FeatureMatrix;
use crate::linalg::Matrix;
use crate::rng::{rng_for, stream, Rng};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// `None` means ⌈√m⌉.
    #[serde(default)]
    pub max_features: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: 16,
            min_leaf: 5,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        prob: f64,
    },
}

/// Flat binary tree; node 0 is the root. Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        let mut i = 0usize;
        loop {
            match self.nodes[i] {
                Node::Leaf { prob } => return prob,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[feature as usize] <= threshold {
                        left as usize
                    } else {
                        right as usize
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left as usize).max(go(t, right as usize)),
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub n_features: usize,
    pub features_per_split: usize,
    /// `(w0, w1)`.
    pub class_weights: (f64, f64),
    pub config: ForestConfig,
}

impl ForestModel {
    pub fn parameter_count(&self) -> usize {
        self.trees.iter().map(|t| t.nodes.len()).sum()
    }

    /// Mean of the per-tree leaf probabilities.
    pub fn predict_row(&self, x: &[f64]) -> f64 {
        let s: f64 = self.trees.iter().map(|t| t.predict_row(x)).sum();
        s / self.trees.len() as f64
    }
}

/// Weighted Gini impurity `1 − Σ p_c²` of a node with class weights `w0`, `w1`.
pub fn gini(w0: f64, w1: f64) -> f64 {
    let total = w0 + w1;
    if total <= 0.0 {
        return 0.0;
    }
    let (p0, p1) = (w0 / total, w1 / total);
    1.0 - p0 * p0 - p1 * p1
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    class_w: [f64; 2],
    mtry: usize,
    cfg: &'a ForestConfig,
    rng: Rng,
    nodes: Vec<Node>,
    feature_order: Vec<usize>,
    buf: Vec<(f64, u8)>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Grower<'_> {
    fn weights(&self, samples: &[usize]) -> (f64, f64) {
        samples.iter().fold((0.0, 0.0), |(a, b), &s| {
            if self.y[s] == 1 {
                (a, b + self.class_w[1])
            } else {
                (a + self.class_w[0], b)
            }
        })
    }

    fn leaf(&mut self, w0: f64, w1: f64) -> u32 {
        let prob = if w0 + w1 > 0.0 { w1 / (w0 + w1) } else { 0.0 };
        self.nodes.push(Node::Leaf { prob });
        (self.nodes.len() - 1) as u32
    }

    fn grow(&mut self, samples: &mut [usize], depth: usize) -> u32 {
        let (w0, w1) = self.weights(samples);
        if depth >= self.cfg.max_depth
            || samples.len() < 2 * self.cfg.min_leaf
            || w0 == 0.0
            || w1 == 0.0
        {
            return self.leaf(w0, w1);
        }
        let Some(best) = self.best_split(samples, w0, w1) else {
            return self.leaf(w0, w1);
        };
        let mut lo = 0;
        for i in 0..samples.len() {
            if self.x.get(samples[i], best.feature) <= best.threshold {
                samples.swap(lo, i);
                lo += 1;
            }
        }
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { prob: 0.0 });
        let (left_s, right_s) = samples.split_at_mut(lo);
        let left = self.grow(left_s, depth + 1);
        let right = self.grow(right_s, depth + 1);
        self.nodes[at] = Node::Split {
            feature: best.feature as u32,
            threshold: best.threshold,
            left,
            right,
        };
        at as u32
    }

    fn best_split(&mut self, samples: &[usize], w0: f64, w1: f64) -> Option<BestSplit> {
        self.feature_order.shuffle(&mut self.rng);
        let mut best: Option<BestSplit> = None;
        let mut tried = 0;
        let min_leaf = self.cfg.min_leaf;
        for fi in 0..self.feature_order.len() {
            if tried >= self.mtry {
                break;
            }
            let f = self.feature_order[fi];
            self.buf.clear();
            self.buf
                .extend(samples.iter().map(|&s| (self.x.get(s, f), self.y[s])));
            self.buf.sort_by(|a, b| a.0.total_cmp(&b.0));
            let n = self.buf.len();
            if self.buf[0].0 == self.buf[n - 1].0 {
                continue;
            }
            tried += 1;
            let (mut l0, mut l1) = (0.0, 0.0);
            for i in 0..n - 1 {
                if self.buf[i].1 == 1 {
                    l1 += self.class_w[1];
                } else {
                    l0 += self.class_w[0];
                }
                let left_n = i + 1;
                if left_n < min_leaf || n - left_n < min_leaf {
                    continue;
                }
                let (a, b) = (self.buf[i].0, self.buf[i + 1].0);
                if a == b {
                    continue;
                }
                let (r0, r1) = (w0 - l0, w1 - l1);
                let score = (l0 + l1) * gini(l0, l1) + (r0 + r1) * gini(r0, r1);
                if best.as_ref().is_none_or(|b| score < b.score) {
                    let mid = 0.5 * (a + b);
                    let threshold = if mid < b { mid } else { a };
                    best = Some(BestSplit {
                        feature: f,
                        threshold,
                        score,
                    });
                }
            }
        }
        best
    }
}

pub fn train_forest(train: &FeatureMatrix, cfg: &ForestConfig, seed: u64) -> Result<ForestModel> {
    let n = train.n_rows();
    let m = train.n_cols();
    if n < 2 {
        return Err(Error::SampleTooSmall(n));
    }
    let (n0, n1) = require_both_classes(&train.target)?;
    if cfg.n_trees == 0 || cfg.min_leaf == 0 {
        return Err(Error::InvalidParameter("forest needs n_trees ≥ 1 and min_leaf ≥ 1".into()));
    }
    let class_w = [n as f64 / (2.0 * n0 as f64), n as f64 / (2.0 * n1 as f64)];
    let mtry = cfg
        .max_features
        .unwrap_or_else(|| libm::ceil(libm::sqrt(m as f64)) as usize)
        .clamp(1, m.max(1));
    let mut trees = Vec::with_capacity(cfg.n_trees);
    for t in 0..cfg.n_trees {
        let mut rng = rng_for(seed, stream::FOREST_TREE, t as u64);
        let mut samples: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let mut g = Grower {
            x: &train.values,
            y: &train.target,
            class_w,
            mtry,
            cfg,
            rng,
            nodes: Vec::new(),
            feature_order: (0..m).collect(),
            buf: Vec::with_capacity(n),
        };
        g.grow(&mut samples, 0);
        trees.push(Tree { nodes: g.nodes });
    }
    Ok(ForestModel {
        trees,
        n_features: m,
        features_per_split: mtry,
        class_weights: (class_w[0], class_w[1]),
        config: *cfg,
    })
}

/// XOR-style toy: two features uniform on [−1, 1], label = sign(x₀) ≠ sign(x₁).
#[cfg(test)]
pub(crate) fn xor_data(n: usize, seed: u64) -> FeatureMatrix {
    use rand::Rng as _;
    let mut rng = rng_for(seed, 99, 0);
    let mut vals = Vec::with_capacity(2 * n);
    let mut target = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.random_range(-1.0..1.0);
        let b: f64 = rng.random_range(-1.0..1.0);
        vals.push(a);
        vals.push(b);
        target.push(((a > 0.0) != (b > 0.0)) as u8);
    }
    FeatureMatrix::from_continuous(Matrix::from_vec(n, 2, vals).unwrap(), &["a", "b"], target).unwrap()
}

#[cfg(test)]
mod tests {
    use alloc::vec;
    use super::*;
    use crate::models::{train_logistic, LogisticConfig};

    fn accuracy(p: &[f64], y: &[u8]) -> f64 {
        p.iter()
            .zip(y)
            .filter(|(p, &y)| ((**p >= 0.5) as u8) == y)
            .count() as f64
            / y.len() as f64
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(3.0, 0.0), 0.0);
        assert_eq!(gini(0.5, 0.5), 0.5);
        assert_eq!(gini(1.0, 1.0), 1.0 - 2.0 * 0.25);
    }

    #[test]
    fn pure_node_becomes_single_leaf() {
        let data = FeatureMatrix::from_continuous(
            Matrix::from_vec(20, 1, (0..20).map(|i| i as f64).collect()).unwrap(),
            &["x"],
            (0..20).map(|i| (i == 0) as u8).collect(),
        )
        .unwrap();
        let f = train_forest(
            &data,
            &ForestConfig {
                n_trees: 3,
                ..ForestConfig::default()
            },
            1,
        )
        .unwrap();
        for t in &f.trees {
            for node in &t.nodes {
                if let Node::Leaf { prob } = node {
                    assert!((0.0..=1.0).contains(prob));
                }
            }
        }
    }

    #[test]
    fn xor_forest_beats_logistic() {
        let train = xor_data(400, 1);
        let test = xor_data(400, 2);
        let f = train_forest(&train, &ForestConfig::default(), 42).unwrap();
        let pf: Vec<f64> = test.values.iter_rows().map(|r| f.predict_row(r)).collect();
        assert!(accuracy(&pf, &test.target) >= 0.95);
        let l = train_logistic(&train, &LogisticConfig::default()).unwrap();
        let pl: Vec<f64> = test.values.iter_rows().map(|r| l.predict_row(r)).collect();
        assert!(accuracy(&pl, &test.target) <= 0.6);
    }

    #[test]
    fn structure_and_determinism() {
        let train = xor_data(300, 3);
        let a = train_forest(&train, &ForestConfig::default(), 5).unwrap();
        let b = train_forest(&train, &ForestConfig::default(), 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trees.len(), 100);
        assert_eq!(a.features_per_split, 2);
        assert!(a.trees.iter().all(|t| t.depth() <= 16));
        for t in &a.trees {
            for node in &t.nodes {
                if let Node::Split { feature, .. } = node {
                    assert!((*feature as usize) < 2);
                }
            }
        }
        assert_eq!(
            a.parameter_count(),
            a.trees.iter().map(|t| t.nodes.len()).sum::<usize>()
        );
    }

    #[test]
    fn identical_stumps_predict_stump_value() {
        let stump = Tree {
            nodes: vec![
                Node::Split {
                    feature: 0,
                    threshold: 0.0,
                    left: 1,
                    right: 2,
                },
                Node::Leaf { prob: 0.2 },
                Node::Leaf { prob: 0.7 },
            ],
        };
        let f = ForestModel {
            trees: vec![stump.clone(), stump.clone(), stump],
            n_features: 1,
            features_per_split: 1,
            class_weights: (1.0, 1.0),
            config: ForestConfig::default(),
        };
        assert!((f.predict_row(&[-1.0]) - 0.2).abs() < 1e-15);
        assert!((f.predict_row(&[1.0]) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn tree_order_does_not_matter() {
        let train = xor_data(200, 4);
        let mut f = train_forest(
            &train,
            &ForestConfig {
                n_trees: 10,
                ..ForestConfig::default()
            },
            9,
        )
        .unwrap();
        let x = [0.3, -0.4];
        let before = f.predict_row(&x);
        f.trees.reverse();
        assert!((f.predict_row(&x) - before).abs() < 1e-12);
    }
}
