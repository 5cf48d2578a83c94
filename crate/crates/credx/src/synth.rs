//! Synthetic loan corpus with a Prosper-like schema.
//!
//! Labels come from a known logit that mixes additive effects with smooth
//! non-linear terms (a U-shaped utilization effect, a debt-to-income ×
//! utilization interaction, a thin-file penalty and an income × term
//! interaction), so the three model families separate in a predictable way.
//! Missing cells, excluded statuses and pre-series loans are injected to
//! exercise every ingest path.

use std::path::{Path, PathBuf};

use credx_core::ingest::{prepare, ColumnRole, ColumnSpec, MacroSeries, PrepareConfig, Prepared, RawTable, Schema, StatusMap, YearMonth};
use credx_core::rng::{rng_for, Rng};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::csv_io::{macro_to_csv, schema_to_toml, write_text};
use crate::error::Result;

const SYNTH_STREAM: u64 = 1001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub rows: usize,
    pub seed: u64,
    /// Target default share among labelled rows.
    pub default_rate: f64,
    /// Multiplier on every label effect.
    pub signal: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            rows: 5000,
            seed: 42,
            default_rate: 0.25,
            signal: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
    pub series: Vec<MacroSeries>,
    pub schema: Schema,
    /// True default probability per row (for tests).
    pub probability: Vec<f64>,
}

pub const LOANS_FILE: &str = "loans.csv";
pub const SCHEMA_FILE: &str = "schema.toml";
pub const MACRO_NAMES: [&str; 3] = ["GDP", "UNRATE", "HPI"];

pub fn macro_file(name: &str) -> String {
    format!("{}.csv", name.to_lowercase())
}

fn col(name: &str, role: ColumnRole, label: &str) -> ColumnSpec {
    ColumnSpec {
        name: name.into(),
        role,
        label: (!label.is_empty()).then(|| label.into()),
    }
}

/// Column roles of the bundled corpus. A reconstruction of the Prosper
/// listing schema's borrower, credit-history, loan and outcome groups.
pub fn bundled_schema() -> Schema {
    use ColumnRole::*;
    Schema {
        status_column: "LoanStatus".into(),
        origination_column: "ListingCreationDate".into(),
        credit_line_column: Some("FirstRecordedCreditLine".into()),
        history_feature: "CreditHistoryMonths".into(),
        id_column: Some("ListingKey".into()),
        status_map: StatusMap::default(),
        columns: vec![
            col("ListingKey", Id, ""),
            col("ListingCreationDate", Date, "Listing date"),
            col("FirstRecordedCreditLine", Date, "First credit line"),
            col("LoanStatus", TargetSource, ""),
            col("Term", Categorical, "Loan term (months)"),
            col("ProsperRating", Categorical, "Prosper rating"),
            col("ProsperScore", Continuous, "Internal risk score"),
            col("BorrowerRate", Continuous, "Interest rate"),
            col("BorrowerAPR", Continuous, "Annual percentage rate"),
            col("CreditScoreRangeLower", Continuous, "Credit score (lower bound)"),
            col("CreditScoreRangeUpper", Continuous, "Credit score (upper bound)"),
            col("EmploymentStatus", Categorical, "Employment status"),
            col("EmploymentStatusDuration", Continuous, "Months in current employment"),
            col("IsBorrowerHomeowner", Categorical, "Homeowner"),
            col("IncomeRange", Categorical, "Income range"),
            col("StatedMonthlyIncome", Continuous, "Monthly income"),
            col("DebtToIncomeRatio", Continuous, "Debt-to-income ratio"),
            col("OpenCreditLines", Continuous, "Open credit lines"),
            col("TotalCreditLinespast7years", Continuous, "Credit lines in past 7 years"),
            col("InquiriesLast6Months", Continuous, "Credit inquiries in last 6 months"),
            col("DelinquenciesLast7Years", Continuous, "Delinquencies in last 7 years"),
            col("RevolvingCreditBalance", Continuous, "Revolving balance"),
            col("BankcardUtilization", Continuous, "Bankcard utilization"),
            col("LoanOriginalAmount", Continuous, "Loan amount"),
            col("MonthlyLoanPayment", Continuous, "Monthly payment"),
            col("ListingCategory", Categorical, "Loan purpose"),
            col("Investors", Continuous, "Number of investors"),
        ],
    }
}

const HEADER: [&str; 28] = [
    "ListingKey",
    "ListingCreationDate",
    "FirstRecordedCreditLine",
    "LoanStatus",
    "Term",
    "ProsperRating",
    "ProsperScore",
    "BorrowerRate",
    "BorrowerAPR",
    "CreditScoreRangeLower",
    "CreditScoreRangeUpper",
    "EmploymentStatus",
    "EmploymentStatusDuration",
    "IsBorrowerHomeowner",
    "IncomeRange",
    "StatedMonthlyIncome",
    "DebtToIncomeRatio",
    "OpenCreditLines",
    "TotalCreditLinespast7years",
    "InquiriesLast6Months",
    "DelinquenciesLast7Years",
    "RevolvingCreditBalance",
    "BankcardUtilization",
    "LoanOriginalAmount",
    "MonthlyLoanPayment",
    "ListingCategory",
    "Investors",
    "MemberKey",
];

fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn pick<'a>(rng: &mut Rng, items: &[(&'a str, f64)]) -> &'a str {
    let total: f64 = items.iter().map(|i| i.1).sum();
    let mut u = rng.random::<f64>() * total;
    for (name, w) in items {
        if u < *w {
            return name;
        }
        u -= w;
    }
    items[items.len() - 1].0
}

fn month_add(m: YearMonth, k: i64) -> YearMonth {
    let ord = m.year as i64 * 12 + (m.month as i64 - 1) + k;
    YearMonth::new(ord.div_euclid(12) as i32, (ord.rem_euclid(12) + 1) as u8).expect("valid month")
}

const SERIES_START: YearMonth = YearMonth { year: 2005, month: 1 };
const SERIES_MONTHS: i64 = 120;

fn unemployment(t: f64) -> f64 {
    // months since 2005-01: flat, recession spike, slow recovery
    if t < 36.0 {
        5.0 - 0.01 * t
    } else if t < 58.0 {
        4.6 + 5.4 * (t - 36.0) / 22.0
    } else {
        (10.0 - 0.065 * (t - 58.0)).max(5.6)
    }
}

fn house_prices(t: f64) -> f64 {
    if t < 18.0 {
        180.0 + 1.1 * t
    } else if t < 76.0 {
        199.8 - 0.95 * (t - 18.0)
    } else {
        144.7 + 0.9 * (t - 76.0)
    }
}

fn gdp(t: f64) -> f64 {
    let trend = 13_000.0 * (1.0 + 0.02f64).powf(t / 12.0);
    let dip = if (42.0..72.0).contains(&t) { 600.0 * ((t - 42.0) / 30.0 * std::f64::consts::PI).sin() } else { 0.0 };
    trend - dip
}

fn round_to(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

fn macro_series(rng: &mut Rng) -> Vec<MacroSeries> {
    let mut g = Vec::new();
    let mut u = Vec::new();
    let mut h = Vec::new();
    for k in 0..SERIES_MONTHS {
        let m = month_add(SERIES_START, k);
        let t = k as f64;
        if k % 3 == 0 {
            g.push((m, round_to(gdp(t) + 25.0 * normal(rng), 0.1)));
        }
        u.push((m, round_to(unemployment(t) + 0.08 * normal(rng), 0.1)));
        h.push((m, round_to(house_prices(t) + 0.4 * normal(rng), 0.01)));
    }
    vec![
        MacroSeries::new("GDP", g).expect("increasing months"),
        MacroSeries::new("UNRATE", u).expect("increasing months"),
        MacroSeries::new("HPI", h).expect("increasing months"),
    ]
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn fmt2(x: f64) -> String {
    format!("{:.2}", x)
}

fn fmt4(x: f64) -> String {
    format!("{:.4}", x)
}

struct Row {
    cells: Vec<String>,
    logit: f64,
    excluded: Option<&'static str>,
}

fn borrower(rng: &mut Rng, i: usize, series: &[MacroSeries], signal: f64) -> Row {
    let q = normal(rng);

    let origin = if rng.random::<f64>() < 0.006 {
        YearMonth::new(2004, rng.random_range(1..=12)).expect("valid month")
    } else {
        month_add(YearMonth::new(2006, 1).expect("valid"), rng.random_range(0..98))
    };
    let history = (12.0 * (15.0 + 7.0 * normal(rng) + 2.5 * q)).clamp(6.0, 540.0).round() as i64;
    let first_line = month_add(origin, -history);
    let day = rng.random_range(1..=28);

    let score_lower = round_to(690.0 + 45.0 * q + 18.0 * normal(rng), 20.0).clamp(520.0, 880.0);
    let prosper_score = (6.0 + 2.0 * q + 1.5 * normal(rng)).round().clamp(1.0, 11.0);
    let rating_z = q + 0.5 * normal(rng);
    let rating = match rating_z {
        z if z > 1.5 => "AA",
        z if z > 0.8 => "A",
        z if z > 0.2 => "B",
        z if z > -0.4 => "C",
        z if z > -1.0 => "D",
        z if z > -1.6 => "E",
        _ => "HR",
    };
    let rate = (0.19 - 0.05 * rating_z + 0.015 * normal(rng)).clamp(0.05, 0.36);
    let apr = rate + 0.028 + 0.004 * normal(rng);

    let employment = pick(
        rng,
        &[
            ("Employed", 0.62),
            ("Full-time", 0.18),
            ("Self-employed", 0.07),
            ("Not employed", 0.04),
            ("Retired", 0.03),
            ("Part-time", 0.03),
            ("Other", 0.03),
        ],
    );
    let emp_duration = (rng.random::<f64>().max(1e-12).ln() * -90.0).round();
    let log_income = 8.45 + 0.45 * normal(rng) + 0.1 * q - if employment == "Not employed" { 0.7 } else { 0.0 };
    let income = log_income.exp();
    let annual = income * 12.0;
    let income_range = if rng.random::<f64>() < 0.05 {
        "Not displayed"
    } else if employment == "Not employed" && annual < 25_000.0 {
        "Not employed"
    } else {
        match annual {
            a if a < 25_000.0 => "$1-24,999",
            a if a < 50_000.0 => "$25,000-49,999",
            a if a < 75_000.0 => "$50,000-74,999",
            a if a < 100_000.0 => "$75,000-99,999",
            _ => "$100,000+",
        }
    };
    let homeowner = rng.random::<f64>() < 0.35 + 0.1 * q.clamp(-1.5, 1.5);

    let dti = (0.26 + 0.12 * normal(rng) - 0.02 * q).clamp(0.01, 1.2);
    let util = sigmoid(0.4 + 0.9 * normal(rng) - 0.4 * q);
    let open_lines = (9.0 + 3.5 * normal(rng)).round().max(0.0);
    let total_lines = (open_lines * 2.2 + 6.0 * normal(rng).abs() + 2.0).round();
    let inquiries = (-(rng.random::<f64>().max(1e-12)).ln() * (1.3 - 0.5 * q).exp()).floor();
    let delinquencies = if rng.random::<f64>() < 0.7 + 0.08 * q.clamp(-2.0, 2.0) {
        0.0
    } else {
        (-(rng.random::<f64>().max(1e-12)).ln() * 6.0).ceil()
    };
    let revolving = (9.0 + 1.1 * normal(rng)).exp().round();

    let term = pick(rng, &[("36", 0.75), ("60", 0.18), ("12", 0.07)]);
    let term_months: f64 = term.parse().expect("numeric term");
    let amount = round_to((8.6 + 0.6 * normal(rng) + 0.15 * q).exp(), 250.0).clamp(1000.0, 35000.0);
    let r = rate / 12.0;
    let payment = amount * r / (1.0 - (1.0 + r).powf(-term_months));
    let category = pick(
        rng,
        &[
            ("Debt Consolidation", 0.55),
            ("Home Improvement", 0.08),
            ("Business", 0.07),
            ("Auto", 0.05),
            ("Other", 0.15),
            ("Not Available", 0.10),
        ],
    );
    let investors = (amount / 200.0 * (0.3 + rng.random::<f64>())).round().max(1.0);

    let unrate = series[1].value_at(origin).unwrap_or(5.0);

    // label logit on the same scales the models see; intercept calibrated later
    let z_score = (score_lower - 690.0) / 45.0;
    let z_inc = ((income - 5000.0) / 2600.0).clamp(-2.5, 4.0);
    let z_dti = (dti - 0.26) / 0.12;
    let z_util = (util - 0.57) / 0.18;
    let z_hist = (history as f64 / 12.0 - 15.0) / 7.0;
    let z_inq = (inquiries - 3.0) / 3.0;
    let linear = -0.45 * z_score - 0.25 * z_inc + 0.25 * z_inq + 0.2 * (delinquencies > 0.0) as u8 as f64
        - 0.15 * homeowner as u8 as f64
        + 0.3 * matches!(employment, "Not employed" | "Other") as u8 as f64
        + 0.12 * (unrate - 7.0);
    let nonlinear = 0.45 * z_util * z_util + 0.6 * z_dti * z_util - 0.5 * z_hist.min(0.0) * z_hist.min(0.0)
        + 0.35 * z_inq * z_score;
    let logit = signal * (linear + nonlinear);

    let miss = |rng: &mut Rng, p: f64, v: String| if rng.random::<f64>() < p { String::new() } else { v };
    let rating_cell = miss(rng, 0.05, rating.into());
    let dti_cell = miss(rng, 0.07, fmt4(dti));
    let util_cell = miss(rng, 0.04, fmt4(util));
    let emp_dur_cell = miss(rng, 0.05, format!("{emp_duration}"));
    let first_line_cell = miss(rng, 0.01, format!("{first_line}-{:02}", day.min(28)));
    let employment_cell = miss(rng, 0.02, employment.into());

    let excluded = match rng.random::<f64>() {
        u if u < 0.015 => Some("Cancelled"),
        u if u < 0.04 => Some("FinalPaymentInProgress"),
        _ => None,
    };

    let cells = vec![
        format!("L{:06}", i + 1),
        format!("{origin}-{day:02}"),
        first_line_cell,
        String::new(),
        term.into(),
        rating_cell,
        format!("{prosper_score}"),
        fmt4(rate),
        fmt4(apr),
        format!("{score_lower}"),
        format!("{}", score_lower + 19.0),
        employment_cell,
        emp_dur_cell,
        if homeowner { "True" } else { "False" }.into(),
        income_range.into(),
        fmt2(income),
        dti_cell,
        format!("{open_lines}"),
        format!("{total_lines}"),
        format!("{inquiries}"),
        format!("{delinquencies}"),
        format!("{revolving}"),
        util_cell,
        format!("{amount}"),
        fmt2(payment),
        category.into(),
        format!("{investors}"),
        format!("M{:08X}", (q.to_bits() >> 20) as u32),
    ];
    Row { cells, logit, excluded }
}

/// Intercept `b` with `mean σ(logit + b) = rate`.
fn calibrate(logits: &[f64], rate: f64) -> f64 {
    let (mut lo, mut hi) = (-30.0, 30.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let mean = logits.iter().map(|l| sigmoid(l + mid)).sum::<f64>() / logits.len() as f64;
        if mean < rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn generate(cfg: &SynthConfig) -> Corpus {
    let mut rng = rng_for(cfg.seed, SYNTH_STREAM, 0);
    let series = macro_series(&mut rng);
    let rows: Vec<Row> = (0..cfg.rows).map(|i| borrower(&mut rng, i, &series, cfg.signal)).collect();
    let logits: Vec<f64> = rows.iter().map(|r| r.logit).collect();
    let b = if logits.is_empty() { 0.0 } else { calibrate(&logits, cfg.default_rate) };
    let mut records = Vec::with_capacity(rows.len());
    let mut probability = Vec::with_capacity(rows.len());
    for mut row in rows {
        let p = sigmoid(row.logit + b);
        let status = if let Some(s) = row.excluded {
            s.to_string()
        } else if rng.random::<f64>() < p {
            pick(
                &mut rng,
                &[
                    ("Chargedoff", 0.62),
                    ("Defaulted", 0.25),
                    ("Past Due (1-15 days)", 0.04),
                    ("Past Due (16-30 days)", 0.03),
                    ("Past Due (31-60 days)", 0.03),
                    ("Past Due (>120 days)", 0.03),
                ],
            )
            .to_string()
        } else {
            pick(&mut rng, &[("Completed", 0.55), ("Current", 0.45)]).to_string()
        };
        row.cells[3] = status;
        records.push(row.cells);
        probability.push(p);
    }
    Corpus {
        header: HEADER.iter().map(|h| h.to_string()).collect(),
        records,
        series,
        schema: bundled_schema(),
        probability,
    }
}

impl Corpus {
    pub fn loans_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.records {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// Writes the loans CSV, one CSV per macro series and the schema into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut files = vec![dir.join(LOANS_FILE)];
        write_text(&files[0], &self.loans_csv())?;
        for s in &self.series {
            let p = dir.join(macro_file(s.name()));
            write_text(&p, &macro_to_csv(s))?;
            files.push(p);
        }
        let p = dir.join(SCHEMA_FILE);
        write_text(&p, &schema_to_toml(&self.schema))?;
        files.push(p);
        Ok(files)
    }

    /// Runs the ingest pipeline on the in-memory corpus.
    pub fn prepare(&self, cfg: &PrepareConfig) -> credx_core::Result<Prepared> {
        let table = RawTable::from_records(&self.header, &self.records, &self.schema.columns)?;
        prepare(&table, &self.series, &self.schema, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let cfg = SynthConfig {
            rows: 300,
            ..SynthConfig::default()
        };
        assert_eq!(generate(&cfg), generate(&cfg));
        let other = generate(&SynthConfig { seed: 7, ..cfg.clone() });
        assert_ne!(other.records, generate(&cfg).records);
    }

    #[test]
    fn header_matches_schema() {
        let c = generate(&SynthConfig {
            rows: 50,
            ..SynthConfig::default()
        });
        for spec in &c.schema.columns {
            assert!(c.header.contains(&spec.name), "{}", spec.name);
        }
        assert!(c.records.iter().all(|r| r.len() == c.header.len()));
    }

    #[test]
    fn calibrated_rate() {
        let c = generate(&SynthConfig::default());
        let mean = c.probability.iter().sum::<f64>() / c.probability.len() as f64;
        assert!((mean - 0.25).abs() < 1e-6);
        let statuses: std::collections::BTreeSet<&str> = c.records.iter().map(|r| r[3].as_str()).collect();
        for s in ["Cancelled", "FinalPaymentInProgress", "Chargedoff", "Completed", "Current"] {
            assert!(statuses.contains(s), "{s}");
        }
        assert!(statuses.iter().any(|s| s.contains("Past Due")));
    }

    #[test]
    fn quarterly_gdp() {
        let c = generate(&SynthConfig {
            rows: 1,
            ..SynthConfig::default()
        });
        assert_eq!(c.series[0].points().len(), 40);
        assert_eq!(c.series[1].points().len(), 120);
    }
}
