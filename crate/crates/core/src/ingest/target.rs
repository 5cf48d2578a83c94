//! Binary default target from the loan status column.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::table::{ColumnRole, RawTable};
use crate::{Error, Result};

/// Status → label table. Statuses matching neither list (nor containing the
/// past-due marker) drop the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusMap {
    pub default: Vec<String>,
    pub non_default: Vec<String>,
    /// Any status containing this marker is labelled default.
    pub past_due_marker: String,
    /// Statuses known to be excluded (reported separately from unknown ones).
    pub excluded: Vec<String>,
}

impl Default for StatusMap {
    fn default() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect();
        StatusMap {
            default: v(&["Chargedoff", "Defaulted"]),
            non_default: v(&["Completed", "Current"]),
            past_due_marker: "Past Due".to_string(),
            excluded: v(&["Cancelled", "FinalPaymentInProgress"]),
        }
    }
}

impl StatusMap {
    /// Label for a status string, `None` when the row is to be dropped.
    pub fn label(&self, status: &str) -> Option<u8> {
        let status = status.trim();
        if self.default.iter().any(|s| s == status) {
            Some(1)
        } else if self.non_default.iter().any(|s| s == status) {
            Some(0)
        } else if !self.past_due_marker.is_empty() && status.contains(&self.past_due_marker) {
            Some(1)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetOutcome {
    /// Labels for the kept rows, aligned with `kept`.
    pub labels: Vec<u8>,
    /// Indices of kept rows in the input table.
    pub kept: Vec<usize>,
    /// Dropped-row counts keyed by status.
    pub dropped: BTreeMap<String, usize>,
}

impl TargetOutcome {
    pub fn dropped_total(&self) -> usize {
        self.dropped.values().sum()
    }
}

pub fn derive_target(
    table: &RawTable,
    status_column: &str,
    map: &StatusMap,
) -> Result<TargetOutcome> {
    let col = table.column_with_role(status_column, ColumnRole::TargetSource)?;
    let mut out = TargetOutcome {
        labels: Vec::new(),
        kept: Vec::new(),
        dropped: BTreeMap::new(),
    };
    for (i, status) in col.cells.iter().enumerate() {
        match map.label(status) {
            Some(y) => {
                out.labels.push(y);
                out.kept.push(i);
            }
            None => *out.dropped.entry(status.trim().to_string()).or_insert(0) += 1,
        }
    }
    if out.kept.is_empty() {
        return Err(Error::AllRowsDropped(table.n_rows()));
    }
    Ok(out)
}
