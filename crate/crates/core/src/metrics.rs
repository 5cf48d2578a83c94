//! Classification metrics and the cross-model comparison table.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use serde::{Deserialize, Serialize};

use crate::models::ModelKind;
use crate::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Counts with the roles of the classes swapped.
    pub fn for_negative_class(&self) -> Confusion {
        Confusion {
            tp: self.tn,
            fp: self.fn_,
            tn: self.tp,
            fn_: self.fp,
        }
    }
}

/// Predicts 1 iff `score ≥ threshold`.
pub fn confusion(y_true: &[u8], scores: &[f64], threshold: f64) -> Result<Confusion> {
    if y_true.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            found: scores.len(),
        });
    }
    let mut c = Confusion::default();
    for (&y, &s) in y_true.iter().zip(scores) {
        match (y == 1, s >= threshold) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fn_ += 1,
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when any of the three had a zero denominator and was reported as 0.
    pub degenerate: bool,
}

/// Precision, recall and F1 for `positive_class` (1 = default).
pub fn precision_recall_f1(counts: &Confusion, positive_class: u8) -> ClassMetrics {
    let c = if positive_class == 1 {
        *counts
    } else {
        counts.for_negative_class()
    };
    let mut degenerate = false;
    let mut ratio = |num: usize, den: usize| {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall == 0.0 {
        degenerate = true;
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    ClassMetrics {
        precision,
        recall,
        f1,
        degenerate,
    }
}

/// Trapezoidal ROC AUC sweeping thresholds over the distinct scores. Tied
/// scores between classes count half, so this equals the Mann–Whitney
/// concordance probability.
pub fn roc_auc(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    if y_true.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            found: scores.len(),
        });
    }
    let pos = y_true.iter().filter(|&&y| y == 1).count();
    let neg = y_true.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    // doubled area in units of (1 / (pos · neg)); integer-valued, so exact
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut area2 = 0u128;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (tp0, fp0) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if y_true[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        area2 += ((fp - fp0) as u128) * ((tp + tp0) as u128);
    }
    Ok(area2 as f64 / (2.0 * pos as f64 * neg as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: ModelKind,
    pub n: usize,
    pub threshold: f64,
    pub confusion: Confusion,
    /// Metrics for the default (1) class.
    pub default_class: ClassMetrics,
    /// Metrics for the non-default (0) class.
    pub non_default_class: ClassMetrics,
    pub auc: f64,
}

pub fn evaluate(model: ModelKind, y_true: &[u8], scores: &[f64], threshold: f64) -> Result<EvalReport> {
    let c = confusion(y_true, scores, threshold)?;
    Ok(EvalReport {
        model,
        n: y_true.len(),
        threshold,
        confusion: c,
        default_class: precision_recall_f1(&c, 1),
        non_default_class: precision_recall_f1(&c, 0),
        auc: roc_auc(y_true, scores)?,
    })
}

/// Comparison rows sorted by AUC, descending; equal AUCs ordered by model name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<EvalReport>,
}

pub fn compare(reports: &[EvalReport]) -> Comparison {
    let mut rows = reports.to_vec();
    rows.sort_by(|a, b| {
        b.auc
            .total_cmp(&a.auc)
            .then_with(|| a.model.as_str().cmp(b.model.as_str()))
    });
    Comparison { rows }
}

impl Comparison {
    /// Fixed-width text table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let header = [
            "model", "AUC", "prec(1)", "rec(1)", "F1(1)", "prec(0)", "rec(0)", "F1(0)", "n",
        ];
        let _ = writeln!(
            out,
            "{:<10}{:>8}{:>9}{:>9}{:>9}{:>9}{:>9}{:>9}{:>7}",
            header[0], header[1], header[2], header[3], header[4], header[5], header[6], header[7], header[8]
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<10}{:>8.4}{:>9.4}{:>9.4}{:>9.4}{:>9.4}{:>9.4}{:>9.4}{:>7}",
                r.model.as_str(),
                r.auc,
                r.default_class.precision,
                r.default_class.recall,
                r.default_class.f1,
                r.non_default_class.precision,
                r.non_default_class.recall,
                r.non_default_class.f1,
                r.n
            );
        }
        let t = self.rows.first().map_or(DEFAULT_THRESHOLD, |r| r.threshold);
        let _ = writeln!(out, "threshold = {t}");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    /// O(n²) pairwise concordance: P(score⁺ > score⁻) + ½ P(tie).
    fn concordance(y: &[u8], s: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..y.len() {
            for j in 0..y.len() {
                if y[i] == 1 && y[j] == 0 {
                    den += 1.0;
                    if s[i] > s[j] {
                        num += 1.0;
                    } else if s[i] == s[j] {
                        num += 0.5;
                    }
                }
            }
        }
        num / den
    }

    #[test]
    fn confusion_basics() {
        let c = confusion(&[1, 0], &[0.9, 0.1], 0.5).unwrap();
        assert_eq!(c, Confusion { tp: 1, fp: 0, tn: 1, fn_: 0 });
        let c = confusion(&[0], &[0.5], 0.5).unwrap();
        assert_eq!(c.fp, 1);
        assert_eq!(confusion(&[], &[], 0.5).unwrap(), Confusion::default());
        assert!(confusion(&[1], &[], 0.5).is_err());
    }

    #[test]
    fn prf_examples() {
        let m = precision_recall_f1(&Confusion { tp: 2, fp: 0, tn: 0, fn_: 0 }, 1);
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        let m = precision_recall_f1(&Confusion { tp: 1, fp: 1, tn: 0, fn_: 3 }, 1);
        assert_eq!(m.precision, 0.5);
        assert_eq!(m.recall, 0.25);
        // 2·0.5·0.25/0.75
        assert!((m.f1 - 1.0 / 3.0).abs() < 1e-15);
        let m = precision_recall_f1(&Confusion { tp: 0, fp: 0, tn: 4, fn_: 1 }, 1);
        assert_eq!(m.precision, 0.0);
        assert!(m.degenerate);
    }

    #[test]
    fn auc_examples() {
        assert_eq!(roc_auc(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9]).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0, 1, 0, 1], &[0.3; 4]).unwrap(), 0.5);
        assert_eq!(roc_auc(&[1, 1], &[0.3, 0.4]), Err(Error::SingleClass));
    }

    #[test]
    fn auc_equals_concordance_on_random_sets() {
        use crate::rng::rng_for;
        use rand::Rng;
        for seed in 0..20 {
            let mut rng = rng_for(seed, 0, 0);
            let y: Vec<u8> = (0..200).map(|_| rng.random_bool(0.3) as u8).collect();
            let coarse = seed % 2 == 0;
            let s: Vec<f64> = (0..200)
                .map(|_| {
                    let v: f64 = rng.random();
                    if coarse { libm::floor(v * 10.0) / 10.0 } else { v }
                })
                .collect();
            assert!((roc_auc(&y, &s).unwrap() - concordance(&y, &s)).abs() <= 1e-12);
        }
    }

    #[test]
    fn compare_sorting() {
        let rep = |model, auc| EvalReport {
            model,
            n: 1,
            threshold: 0.5,
            confusion: Confusion::default(),
            default_class: precision_recall_f1(&Confusion::default(), 1),
            non_default_class: precision_recall_f1(&Confusion::default(), 0),
            auc,
        };
        assert_eq!(compare(&[rep(ModelKind::Mlp, 0.7)]).rows.len(), 1);
        let c = compare(&[rep(ModelKind::Mlp, 0.7), rep(ModelKind::Forest, 0.8)]);
        assert_eq!(c.rows[0].model, ModelKind::Forest);
        let c = compare(&[rep(ModelKind::Mlp, 0.7), rep(ModelKind::Logistic, 0.7), rep(ModelKind::Forest, 0.7)]);
        let order: Vec<_> = c.rows.iter().map(|r| r.model).collect();
        assert_eq!(order, vec![ModelKind::Forest, ModelKind::Logistic, ModelKind::Mlp]);
        assert!(c.to_text().lines().count() == 5);
    }

    proptest! {
        #[test]
        fn auc_invariant_under_monotone_transform(
            pairs in proptest::collection::vec((any::<bool>(), 0.0f64..1.0), 4..60)
        ) {
            let y: Vec<u8> = pairs.iter().map(|p| p.0 as u8).collect();
            prop_assume!(y.contains(&0) && y.contains(&1));
            let s: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let t: Vec<f64> = s.iter().map(|v| libm::exp(3.0 * v) + 2.0).collect();
            let a = roc_auc(&y, &s).unwrap();
            prop_assert_eq!(a, roc_auc(&y, &t).unwrap());
            // permutation invariance
            let mut idx: Vec<usize> = (0..y.len()).collect();
            idx.reverse();
            let yr: Vec<u8> = idx.iter().map(|&i| y[i]).collect();
            let sr: Vec<f64> = idx.iter().map(|&i| s[i]).collect();
            prop_assert_eq!(a, roc_auc(&yr, &sr).unwrap());
        }

        #[test]
        fn auc_complement_without_ties(
            pairs in proptest::collection::vec((any::<bool>(), 0.0f64..1.0), 4..60)
        ) {
            let y: Vec<u8> = pairs.iter().map(|p| p.0 as u8).collect();
            prop_assume!(y.contains(&0) && y.contains(&1));
            let s: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let mut sorted = s.clone();
            sorted.sort_by(f64::total_cmp);
            prop_assume!(sorted.windows(2).all(|w| w[0] != w[1]));
            let flipped: Vec<f64> = s.iter().map(|v| 1.0 - v).collect();
            let a = roc_auc(&y, &s).unwrap();
            let b = roc_auc(&y, &flipped).unwrap();
            prop_assert!((a + b - 1.0).abs() < 1e-12);
        }

        #[test]
        fn f1_is_harmonic_mean(tp in 0usize..50, fp in 0usize..50, fn_ in 0usize..50) {
            let m = precision_recall_f1(&Confusion { tp, fp, tn: 0, fn_ }, 1);
            if m.precision + m.recall > 0.0 {
                let h = 2.0 * m.precision * m.recall / (m.precision + m.recall);
                prop_assert!((m.f1 - h).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn report_counts_sum_to_n() {
        let r = evaluate(ModelKind::Logistic, &[1, 0, 1, 0], &[0.9, 0.2, 0.4, 0.6], 0.5).unwrap();
        assert_eq!(r.confusion.total(), r.n);
    }
}
