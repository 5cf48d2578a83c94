//! CSV and TOML inputs, and the prepared-matrix files.

use std::fs;
use std::path::{Path, PathBuf};

use credx_core::ingest::{ColumnSpec, FeatureColumn, FeatureMatrix, MacroSeries, PrepareSummary, Preprocessor, RawTable, Schema, YearMonth};
use credx_core::Matrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        },
        _ => Error::parse(path, e),
    }
}

/// Loads a headed CSV; declared columns take their schema role, the rest are ignored.
pub fn load_csv(path: &Path, declared: &[ColumnSpec]) -> Result<RawTable> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        records.push(rec.iter().map(str::to_string).collect());
    }
    RawTable::from_records(&header, &records, declared).map_err(|e| Error::data(path, e))
}

pub fn load_schema(path: &Path) -> Result<Schema> {
    toml::from_str(&read_text(path)?).map_err(|e| Error::parse(path, e))
}

pub fn schema_to_toml(schema: &Schema) -> String {
    toml::to_string(schema).expect("schema serializes to TOML")
}

/// Two columns, `YYYY-MM` and value; an optional header row is skipped.
pub fn load_macro(path: &Path, name: &str) -> Result<MacroSeries> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(file);
    let mut points = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        if rec.len() != 2 {
            return Err(Error::parse(path, format!("line {}: expected 2 fields, found {}", i + 1, rec.len())));
        }
        let month = YearMonth::parse(&rec[0]);
        if month.is_none() && i == 0 {
            continue;
        }
        let month = month.ok_or_else(|| Error::parse(path, format!("line {}: bad month `{}`", i + 1, &rec[0])))?;
        let value: f64 = rec[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, format!("line {}: bad value `{}`", i + 1, &rec[1])))?;
        points.push((month, value));
    }
    MacroSeries::new(name, points).map_err(|e| Error::data(path, e))
}

pub fn macro_to_csv(series: &MacroSeries) -> String {
    let mut out = String::from("month,value\n");
    for (m, v) in series.points() {
        out.push_str(&format!("{m},{v}\n"));
    }
    out
}

const ID_HEADER: &str = "row_id";
const TARGET_HEADER: &str = "target";

/// `row_id, <features…>, target`; floats in shortest round-trip form.
pub fn matrix_to_csv(m: &FeatureMatrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![ID_HEADER.to_string()];
    header.extend(m.names());
    header.push(TARGET_HEADER.to_string());
    w.write_record(&header).expect("in-memory write");
    for r in 0..m.n_rows() {
        let mut rec = Vec::with_capacity(m.n_cols() + 2);
        rec.push(m.row_ids.get(r).cloned().unwrap_or_else(|| r.to_string()));
        rec.extend(m.values.row(r).iter().map(|v| format!("{v}")));
        rec.push(m.target[r].to_string());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn matrix_from_csv(path: &Path, columns: &[FeatureColumn]) -> Result<FeatureMatrix> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let header: Vec<String> = reader.headers().map_err(|e| csv_error(path, e))?.iter().map(str::to_string).collect();
    let expected: Vec<&str> = std::iter::once(ID_HEADER)
        .chain(columns.iter().map(|c| c.name.as_str()))
        .chain(std::iter::once(TARGET_HEADER))
        .collect();
    if header != expected {
        return Err(Error::format(path, "matrix header does not match the metadata column list"));
    }
    let m = columns.len();
    let mut values = Vec::new();
    let mut target = Vec::new();
    let mut ids = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = i + 2;
        ids.push(rec[0].to_string());
        for j in 1..=m {
            let v: f64 = rec[j]
                .parse()
                .map_err(|_| Error::parse(path, format!("line {line}: bad number `{}`", &rec[j])))?;
            values.push(v);
        }
        target.push(match &rec[m + 1] {
            "0" => 0,
            "1" => 1,
            other => return Err(Error::parse(path, format!("line {line}: bad target `{other}`"))),
        });
    }
    let n = target.len();
    let values = Matrix::from_vec(n, m, values).map_err(|e| Error::data(path, e))?;
    let mut fm = FeatureMatrix::new(values, columns.to_vec(), target).map_err(|e| Error::data(path, e))?;
    fm.row_ids = ids;
    Ok(fm)
}

pub const PREPARED_SCHEMA: &str = "credx.prepared/v1";

/// Sidecar written next to the train/test matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedMeta {
    pub schema: String,
    pub columns: Vec<FeatureColumn>,
    pub preprocessor: Preprocessor,
    pub summary: PrepareSummary,
    pub status_map: credx_core::ingest::StatusMap,
    /// Plain-language labels for source columns.
    pub labels: std::collections::BTreeMap<String, String>,
}

pub struct PreparedFiles {
    pub dir: PathBuf,
}

impl PreparedFiles {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        PreparedFiles { dir: dir.into() }
    }
    pub fn train(&self) -> PathBuf {
        self.dir.join("train.csv")
    }
    pub fn test(&self) -> PathBuf {
        self.dir.join("test.csv")
    }
    pub fn meta(&self) -> PathBuf {
        self.dir.join("metadata.json")
    }

    pub fn write(&self, train: &FeatureMatrix, test: &FeatureMatrix, meta: &PreparedMeta) -> Result<()> {
        write_text(&self.train(), &matrix_to_csv(train))?;
        write_text(&self.test(), &matrix_to_csv(test))?;
        write_text(&self.meta(), &(crate::report::to_json(meta) + "\n"))
    }

    pub fn read_meta(&self) -> Result<PreparedMeta> {
        let path = self.meta();
        let meta: PreparedMeta = serde_json::from_str(&read_text(&path)?).map_err(|e| Error::parse(&path, e))?;
        if meta.schema != PREPARED_SCHEMA {
            return Err(Error::format(&path, format!("expected schema `{PREPARED_SCHEMA}`, found `{}`", meta.schema)));
        }
        Ok(meta)
    }

    pub fn read(&self) -> Result<(FeatureMatrix, FeatureMatrix, PreparedMeta)> {
        let meta = self.read_meta()?;
        let train = matrix_from_csv(&self.train(), &meta.columns)?;
        let test = matrix_from_csv(&self.test(), &meta.columns)?;
        Ok((train, test, meta))
    }
}
