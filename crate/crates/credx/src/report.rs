//! Schema-tagged JSON reports.
//!
//! Every report is a JSON object whose first field is `"schema":
//! "credx.<type>/v<version>"` followed by the report's own fields. Readers
//! reject any other tag.

use std::path::Path;

use credx_core::explain::Explanation;
use credx_core::ingest::PrepareSummary;
use credx_core::metrics::{Comparison, EvalReport};
use credx_core::scorecard::ScoreCard;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::csv_io::{read_text, write_text};
use crate::error::{Error, Result};
use crate::notice::AdverseActionNotice;

pub trait Report: Serialize + DeserializeOwned {
    const SCHEMA: &'static str;
}

impl Report for EvalReport {
    const SCHEMA: &'static str = "credx.eval/v1";
}
impl Report for Comparison {
    const SCHEMA: &'static str = "credx.comparison/v1";
}
impl Report for Explanation {
    const SCHEMA: &'static str = "credx.explanation/v1";
}
impl Report for ScoreCard {
    const SCHEMA: &'static str = "credx.scorecard/v1";
}
impl Report for AdverseActionNotice {
    const SCHEMA: &'static str = "credx.notice/v1";
}
impl Report for PrepareSummary {
    const SCHEMA: &'static str = "credx.prepare-summary/v1";
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize to JSON")
}

pub fn render<T: Report>(value: &T) -> String {
    to_json(&Envelope {
        schema: T::SCHEMA,
        body: value,
    }) + "\n"
}

/// Parses a report, checking the schema tag first.
pub fn parse<T: Report>(text: &str) -> std::result::Result<T, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(tag) if tag == T::SCHEMA => {}
        Some(tag) => return Err(format!("expected schema `{}`, found `{tag}`", T::SCHEMA)),
        None => return Err(format!("missing schema tag (expected `{}`)", T::SCHEMA)),
    }
    serde_json::from_value(value).map_err(|e| e.to_string())
}

pub fn emit_report<T: Report>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &render(value))
}

pub fn read_report<T: Report>(path: &Path) -> Result<T> {
    parse(&read_text(path)?).map_err(|m| Error::format(path, m))
}
