//! Monthly macroeconomic series and the as-of join onto loan rows.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use super::table::{ColumnRole, RawColumn, RawTable};
use crate::{Error, Result};

/// Calendar month. Ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Option<Self> {
        (1..=12).contains(&month).then_some(YearMonth { year, month })
    }

    /// Parses the `YYYY-MM` prefix of `YYYY-MM`, `YYYY-MM-DD` or
    /// `YYYY-MM-DD hh:mm:ss`.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        let bytes = s.as_bytes();
        if bytes.len() < 7 || bytes[4] != b'-' {
            return None;
        }
        if bytes.len() > 7 && bytes[7] != b'-' {
            return None;
        }
        let year: i32 = s.get(0..4)?.parse().ok()?;
        let month: u8 = s.get(5..7)?.parse().ok()?;
        YearMonth::new(year, month)
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    /// Whole months from `earlier` to `self` (negative if `earlier` is later).
    pub fn months_since(self, earlier: YearMonth) -> i64 {
        self.ordinal() - earlier.ordinal()
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// A named series with strictly increasing months. Quarterly data is stored
/// at its quarter-start months and forward-filled by [`MacroSeries::value_at`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroSeries {
    name: String,
    points: Vec<(YearMonth, f64)>,
}

impl MacroSeries {
    pub fn new(name: impl Into<String>, points: Vec<(YearMonth, f64)>) -> Result<Self> {
        let name = name.into();
        let bad = |reason: String| Error::InvalidSeries {
            name: name.clone(),
            reason,
        };
        if points.is_empty() {
            return Err(bad("no points".into()));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(bad(format!("months not strictly increasing at {}", w[1].0)));
            }
        }
        if let Some((m, _)) = points.iter().find(|(_, v)| !v.is_finite()) {
            return Err(bad(format!("non-finite value at {m}")));
        }
        Ok(MacroSeries { name, points })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[(YearMonth, f64)] {
        &self.points
    }

    /// Value of the latest point whose month is not after `month`.
    pub fn value_at(&self, month: YearMonth) -> Option<f64> {
        let idx = self.points.partition_point(|(m, _)| *m <= month);
        idx.checked_sub(1).map(|i| self.points[i].1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub table: RawTable,
    /// Input row indices retained, in order.
    pub kept: Vec<usize>,
    /// Rows whose origination month precedes the first point of some series.
    pub dropped: usize,
}

/// Appends one continuous column per series holding the as-of value for each
/// loan's origination month.
pub fn merge_macro(
    table: &RawTable,
    series: &[MacroSeries],
    date_column: &str,
) -> Result<MergeOutcome> {
    let col = table.column_with_role(date_column, ColumnRole::Date)?;
    let mut kept = Vec::with_capacity(table.n_rows());
    let mut values: Vec<Vec<String>> = series.iter().map(|_| Vec::new()).collect();
    for (row, cell) in col.cells.iter().enumerate() {
        let month = YearMonth::parse(cell).ok_or_else(|| Error::Parse {
            row,
            column: date_column.to_string(),
            value: cell.clone(),
            what: "date",
        })?;
        let joined: Option<Vec<f64>> = series.iter().map(|s| s.value_at(month)).collect();
        if let Some(vals) = joined {
            kept.push(row);
            for (out, v) in values.iter_mut().zip(vals) {
                out.push(format!("{v}"));
            }
        }
    }
    let mut merged = table.select_rows(&kept);
    for (s, cells) in series.iter().zip(values) {
        merged.push_column(RawColumn {
            name: s.name().to_string(),
            role: ColumnRole::Continuous,
            cells,
        })?;
    }
    Ok(MergeOutcome {
        dropped: table.n_rows() - kept.len(),
        table: merged,
        kept,
    })
}

/// Adds a continuous column with the month span `to − from` between two date
/// columns. Unparseable or negative spans become empty (missing) cells.
pub fn derive_month_span(table: &mut RawTable, from: &str, to: &str, name: &str) -> Result<()> {
    let a = table.column_with_role(from, ColumnRole::Date)?;
    let b = table.column_with_role(to, ColumnRole::Date)?;
    let cells = a
        .cells
        .iter()
        .zip(&b.cells)
        .map(|(x, y)| match (YearMonth::parse(x), YearMonth::parse(y)) {
            (Some(from), Some(to)) if to >= from => format!("{}", to.months_since(from)),
            _ => String::new(),
        })
        .collect();
    table.push_column(RawColumn {
        name: name.to_string(),
        role: ColumnRole::Continuous,
        cells,
    })
}
