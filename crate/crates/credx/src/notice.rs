//! Adverse-action notices: the principal reasons pushing an application
//! toward default, in plain-language feature names and raw units.

use std::collections::BTreeMap;

use credx_core::explain::{Attribution, Explanation};
use credx_core::ingest::{ColumnKind, FeatureColumn};
use credx_core::models::ModelKind;
use serde::{Deserialize, Serialize};

pub const MAX_REASONS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Approve,
    Deny,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reason {
    pub feature: String,
    /// Plain-language statement, e.g. `Debt-to-income ratio: 0.52`.
    pub description: String,
    pub weight: f64,
    /// De-standardized value for continuous features.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdverseActionNotice {
    pub instance: String,
    pub model: ModelKind,
    pub decision: Decision,
    pub probability: f64,
    pub threshold: f64,
    pub reasons: Vec<Reason>,
}

/// Positive attributions, largest first (ties by name), capped at four.
pub fn principal_reasons(attributions: &[Attribution]) -> Vec<&Attribution> {
    let mut pos: Vec<&Attribution> = attributions.iter().filter(|a| a.weight > 0.0).collect();
    pos.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.feature.cmp(&b.feature)));
    pos.truncate(MAX_REASONS);
    pos
}

fn format_value(v: f64) -> String {
    let r = (v * 100.0).round() / 100.0;
    if r == r.trunc() && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else {
        format!("{r:.2}")
    }
}

/// Describes one feature of the instance for a reader of the notice.
fn describe(column: Option<&FeatureColumn>, feature: &str, z: Option<f64>, labels: &BTreeMap<String, String>) -> (String, Option<f64>) {
    let Some(col) = column else {
        return (feature.to_string(), None);
    };
    let label = labels.get(&col.source).cloned().unwrap_or_else(|| col.source.clone());
    match &col.kind {
        ColumnKind::Indicator { level } => {
            let present = z.is_some_and(|v| v >= 0.5);
            if present {
                (format!("{label}: {level}"), None)
            } else {
                (format!("{label}: not {level}"), None)
            }
        }
        ColumnKind::Continuous => {
            let raw = match (z, col.scaling) {
                (Some(z), Some(s)) => Some(s.invert(z)),
                (Some(z), None) => Some(z),
                _ => None,
            };
            match raw {
                Some(v) => (format!("{label}: {}", format_value(v)), Some(v)),
                None => (label, None),
            }
        }
    }
}

/// Builds the notice; reasons are listed only for denials.
pub fn build_notice(
    explanation: &Explanation,
    model: ModelKind,
    threshold: f64,
    columns: &[FeatureColumn],
    instance: &[f64],
    labels: &BTreeMap<String, String>,
) -> AdverseActionNotice {
    let probability = explanation.prediction;
    let decision = if probability >= threshold { Decision::Deny } else { Decision::Approve };
    let reasons = match decision {
        Decision::Approve => Vec::new(),
        Decision::Deny => principal_reasons(&explanation.attributions)
            .into_iter()
            .map(|a| {
                let idx = columns.iter().position(|c| c.name == a.feature);
                let (description, value) = describe(idx.map(|i| &columns[i]), &a.feature, idx.and_then(|i| instance.get(i).copied()), labels);
                Reason {
                    feature: a.feature.clone(),
                    description,
                    weight: a.weight,
                    value,
                }
            })
            .collect(),
    };
    AdverseActionNotice {
        instance: explanation.instance.clone().unwrap_or_default(),
        model,
        decision,
        probability,
        threshold,
        reasons,
    }
}

impl AdverseActionNotice {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("ADVERSE ACTION NOTICE\n");
        s.push_str(&format!("Application: {}\n", self.instance));
        s.push_str(&format!("Model: {}\n", self.model));
        match self.decision {
            Decision::Deny => s.push_str(&format!(
                "Decision: DENY (estimated default probability {:.4} >= threshold {:.4})\n",
                self.probability, self.threshold
            )),
            Decision::Approve => s.push_str(&format!(
                "Decision: APPROVE (estimated default probability {:.4} < threshold {:.4})\n",
                self.probability, self.threshold
            )),
        }
        if self.reasons.is_empty() {
            s.push_str("Principal reasons: none\n");
        } else {
            s.push_str("Principal reasons for this decision:\n");
            for (i, r) in self.reasons.iter().enumerate() {
                s.push_str(&format!("  {}. {} (contribution {:+.4})\n", i + 1, r.description, r.weight));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use credx_core::explain::Method;
    use credx_core::ingest::Scaling;

    fn attr(f: &str, w: f64) -> Attribution {
        Attribution {
            feature: f.into(),
            weight: w,
        }
    }

    fn explanation(p: f64, attrs: Vec<Attribution>) -> Explanation {
        Explanation {
            method: Method::Lime,
            seed: 0,
            base_value: 0.2,
            prediction: p,
            attributions: attrs,
            fidelity: Some(1.0),
            degenerate: false,
            top_k: 10,
            instance: Some("L1".into()),
        }
    }

    fn continuous(name: &str, mean: f64, std: f64) -> FeatureColumn {
        FeatureColumn {
            name: name.into(),
            source: name.into(),
            kind: ColumnKind::Continuous,
            scaling: Some(Scaling { mean, std }),
        }
    }

    #[test]
    fn denied_reasons_filter_and_sort() {
        let e = explanation(0.8, vec![attr("DebtToIncomeRatio", 0.20), attr("InterestRate", 0.10), attr("Income", -0.15)]);
        let cols = vec![continuous("DebtToIncomeRatio", 0.3, 0.1), continuous("InterestRate", 0.2, 0.05), continuous("Income", 5000.0, 2000.0)];
        let mut labels = BTreeMap::new();
        labels.insert("DebtToIncomeRatio".to_string(), "Debt-to-income ratio".to_string());
        let n = build_notice(&e, ModelKind::Forest, 0.5, &cols, &[2.0, 1.0, -1.0], &labels);
        assert_eq!(n.decision, Decision::Deny);
        let names: Vec<&str> = n.reasons.iter().map(|r| r.feature.as_str()).collect();
        assert_eq!(names, vec!["DebtToIncomeRatio", "InterestRate"]);
        assert_eq!(n.reasons[0].description, "Debt-to-income ratio: 0.50");
        assert!((n.reasons[0].value.unwrap() - 0.5).abs() < 1e-12);
        assert!(n.to_text().contains("1. Debt-to-income ratio: 0.50"));
    }

    #[test]
    fn approved_has_no_reasons() {
        let e = explanation(0.2, vec![attr("a", 0.3)]);
        let n = build_notice(&e, ModelKind::Logistic, 0.5, &[], &[0.0], &BTreeMap::new());
        assert_eq!(n.decision, Decision::Approve);
        assert!(n.reasons.is_empty());
        assert!(n.to_text().contains("APPROVE"));
    }

    #[test]
    fn capped_at_four() {
        let attrs: Vec<Attribution> = (0..7).map(|i| attr(&format!("f{i}"), 0.1 * (i + 1) as f64)).collect();
        let e = explanation(0.9, attrs);
        let n = build_notice(&e, ModelKind::Mlp, 0.5, &[], &[0.0; 7], &BTreeMap::new());
        let names: Vec<&str> = n.reasons.iter().map(|r| r.feature.as_str()).collect();
        assert_eq!(names, vec!["f6", "f5", "f4", "f3"]);
    }

    #[test]
    fn threshold_boundary_denies() {
        let e = explanation(0.5, vec![attr("a", 0.3)]);
        assert_eq!(build_notice(&e, ModelKind::Mlp, 0.5, &[], &[0.0], &BTreeMap::new()).decision, Decision::Deny);
    }

    #[test]
    fn indicator_reason_names_level() {
        let col = FeatureColumn {
            name: "Term=60".into(),
            source: "Term".into(),
            kind: ColumnKind::Indicator { level: "60".into() },
            scaling: None,
        };
        let mut labels = BTreeMap::new();
        labels.insert("Term".to_string(), "Loan term (months)".to_string());
        let e = explanation(0.7, vec![attr("Term=60", 0.2)]);
        let n = build_notice(&e, ModelKind::Forest, 0.5, &[col], &[1.0], &labels);
        assert_eq!(n.reasons[0].description, "Loan term (months): 60");
    }
}
