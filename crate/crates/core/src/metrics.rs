//! Verifier result tallies and the classification metrics computed from
//! them, with undecidable outcomes either excluded or counted as failures.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::acquire::LineDiagnostic;
use crate::property::{parse_bool, Property};

pub const RESULTS_HEADER: [&str; 4] = ["benchmark", "property", "expected", "actual"];

/// What a verifier answered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Outcome {
    True,
    False,
    Unknown,
    Error,
    Timeout,
}

impl Outcome {
    pub const ALL: [Outcome; 5] = [
        Outcome::True,
        Outcome::False,
        Outcome::Unknown,
        Outcome::Error,
        Outcome::Timeout,
    ];

    pub fn is_undecidable(self) -> bool {
        !matches!(self, Outcome::True | Outcome::False)
    }
}

impl FromStr for Outcome {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "true" => Ok(Outcome::True),
            "false" => Ok(Outcome::False),
            "unknown" => Ok(Outcome::Unknown),
            "error" => Ok(Outcome::Error),
            "timeout" => Ok(Outcome::Timeout),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunRecord {
    pub benchmark: String,
    pub property: Property,
    pub expected: bool,
    pub actual: Outcome,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResultsError {
    #[error("results file must start with the header `benchmark,property,expected,actual`")]
    Header,
    #[error("malformed results file: {0}")]
    Csv(String),
}

/// Parses the results interchange CSV. Rows with an unknown property,
/// verdict or outcome are skipped and reported.
pub fn parse_results(csv_text: &str) -> Result<(Vec<RunRecord>, Vec<LineDiagnostic>), ResultsError> {
    if csv_text.trim().is_empty() {
        return Ok((vec![], vec![]));
    }
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());
    let header = reader.headers().map_err(|e| ResultsError::Csv(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != RESULTS_HEADER {
        return Err(ResultsError::Header);
    }
    let mut records = Vec::new();
    let mut diags = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| ResultsError::Csv(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let reject = |message: String| LineDiagnostic { line, message };
        if row.len() != 4 {
            diags.push(reject(format!("expected 4 columns, found {}", row.len())));
            continue;
        }
        let Ok(property) = row[1].parse::<Property>() else {
            diags.push(reject(format!("unknown property `{}`", &row[1])));
            continue;
        };
        let Some(expected) = parse_bool(&row[2]) else {
            diags.push(reject(format!("expected verdict `{}` is not true or false", &row[2])));
            continue;
        };
        let Ok(actual) = row[3].parse::<Outcome>() else {
            diags.push(reject(format!("unknown outcome `{}`", &row[3])));
            continue;
        };
        records.push(RunRecord {
            benchmark: row[0].to_string(),
            property,
            expected,
            actual,
        });
    }
    Ok((records, diags))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    /// Expected true, undecidable answer.
    pub u_pos: u64,
    /// Expected false, undecidable answer.
    pub u_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_ + self.u_pos + self.u_neg
    }

    pub fn add(&mut self, r: &RunRecord) {
        match (r.expected, r.actual) {
            (true, Outcome::True) => self.tp += 1,
            (false, Outcome::False) => self.tn += 1,
            (false, Outcome::True) => self.fp += 1,
            (true, Outcome::False) => self.fn_ += 1,
            (true, _) => self.u_pos += 1,
            (false, _) => self.u_neg += 1,
        }
    }

    pub fn merge(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + o.tp,
            tn: self.tn + o.tn,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            u_pos: self.u_pos + o.u_pos,
            u_neg: self.u_neg + o.u_neg,
        }
    }
}

/// Counts over all records, or only those of `property`.
pub fn tabulate(records: &[RunRecord], property: Option<Property>) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for r in records.iter().filter(|r| property.is_none_or(|p| r.property == p)) {
        c.add(r);
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    Exclusive,
    UndecidableInclusive,
}

pub type Rational = Ratio<u64>;

/// `None` is an undefined (0/0) value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSet {
    pub mode: Mode,
    pub accuracy: Option<Rational>,
    pub precision: Option<Rational>,
    pub recall: Option<Rational>,
    pub specificity: Option<Rational>,
    /// Inclusive mode only.
    pub pct_undecidable: Option<Rational>,
}

fn ratio(num: u64, den: u64) -> Option<Rational> {
    (den != 0).then(|| Ratio::new(num, den))
}

pub fn metrics_exclusive(c: &ConfusionCounts) -> MetricSet {
    MetricSet {
        mode: Mode::Exclusive,
        accuracy: ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn_),
        precision: ratio(c.tp, c.tp + c.fp),
        recall: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
        pct_undecidable: None,
    }
}

pub fn metrics_ui(c: &ConfusionCounts) -> MetricSet {
    MetricSet {
        mode: Mode::UndecidableInclusive,
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision: ratio(c.tp, c.tp + c.fp),
        recall: ratio(c.tp, c.tp + c.fn_ + c.u_pos),
        specificity: ratio(c.tn, c.tn + c.fp + c.u_neg),
        pct_undecidable: ratio(c.u_pos + c.u_neg, c.total()),
    }
}

pub const UNDEFINED: &str = "—";

/// Half-up rounding of a non-negative rational to `decimals` places.
pub fn format_decimal(r: Rational, decimals: u32) -> String {
    let scale = 10u128.pow(decimals);
    let num = *r.numer() as u128 * scale;
    let den = *r.denom() as u128;
    let mut q = num / den;
    if 2 * (num % den) >= den {
        q += 1;
    }
    if decimals == 0 {
        return q.to_string();
    }
    format!("{}.{:0width$}", q / scale, q % scale, width = decimals as usize)
}

pub fn format_metric(r: Option<Rational>) -> String {
    r.map_or_else(|| UNDEFINED.to_string(), |r| format_decimal(r, 2))
}

/// Integer percent, half-up.
pub fn format_percent(r: Option<Rational>) -> String {
    r.map_or_else(|| UNDEFINED.to_string(), |r| format!("{}%", format_decimal(r * 100, 0)))
}

fn exact(r: Option<Rational>) -> String {
    match r {
        None => String::new(),
        Some(r) if r.is_zero() => "0".to_string(),
        Some(r) => r.to_string(),
    }
}

/// One column group of a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportColumn {
    pub label: String,
    pub exclusive: MetricSet,
    pub inclusive: Option<MetricSet>,
}

impl ReportColumn {
    pub fn from_counts(label: &str, c: &ConfusionCounts) -> ReportColumn {
        ReportColumn {
            label: label.to_string(),
            exclusive: metrics_exclusive(c),
            inclusive: Some(metrics_ui(c)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub text: String,
    /// `metric,column,value,exact` rows; `exact` is the unrounded fraction.
    pub csv: String,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

type Row = (&'static str, fn(&ReportColumn) -> Option<Option<Rational>>, bool);

const ROWS: [Row; 8] = [
    ("Accuracy", |c| Some(c.exclusive.accuracy), false),
    ("Precision", |c| Some(c.exclusive.precision), false),
    ("Recall", |c| Some(c.exclusive.recall), false),
    ("Specificity", |c| Some(c.exclusive.specificity), false),
    ("UI Accuracy", |c| c.inclusive.map(|m| m.accuracy), false),
    ("UI Recall", |c| c.inclusive.map(|m| m.recall), false),
    ("UI Specificity", |c| c.inclusive.map(|m| m.specificity), false),
    ("% Undecidable", |c| c.inclusive.map(|m| m.pct_undecidable), true),
];

/// Renders an aligned text table and a CSV with rounded and exact values.
/// Inclusive rows appear when any column carries an inclusive set.
pub fn render_report(columns: &[ReportColumn]) -> Report {
    // (shown, exact) for a row and column; `None` when the column has no
    // set for that row's mode
    let cell = |row: &Row, c: &ReportColumn| -> Option<(String, String)> {
        let (_, get, percent) = row;
        get(c).map(|v| {
            let shown = if *percent { format_percent(v) } else { format_metric(v) };
            (shown, exact(v))
        })
    };
    let rows: Vec<&Row> = ROWS
        .iter()
        .filter(|r| columns.iter().any(|c| cell(r, c).is_some()))
        .collect();
    let label_width = rows.iter().map(|(l, _, _)| l.chars().count()).max().unwrap_or(0);
    let widths: Vec<usize> = columns
        .iter()
        .map(|c| {
            rows.iter()
                .filter_map(|r| cell(r, c))
                .map(|(shown, _)| shown.chars().count())
                .chain(std::iter::once(c.label.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let pad = |s: &str, w: usize, right: bool| {
        let fill = " ".repeat(w.saturating_sub(s.chars().count()));
        if right {
            format!("{fill}{s}")
        } else {
            format!("{s}{fill}")
        }
    };
    let mut head = pad("", label_width, false);
    for (c, w) in columns.iter().zip(&widths) {
        head.push_str("  ");
        head.push_str(&pad(&c.label, *w, true));
    }
    let mut text = head.trim_end().to_string();
    text.push('\n');
    let mut csv_out = csv::Writer::from_writer(Vec::new());
    csv_out.write_record(["metric", "column", "value", "exact"]).expect("in-memory write");
    for row in &rows {
        let mut line = pad(row.0, label_width, false);
        for (c, w) in columns.iter().zip(&widths) {
            let (shown, raw) = cell(row, c).unwrap_or_default();
            line.push_str("  ");
            line.push_str(&pad(&shown, *w, true));
            if cell(row, c).is_some() {
                csv_out
                    .write_record([row.0, c.label.as_str(), shown.as_str(), raw.as_str()])
                    .expect("in-memory write");
            }
        }
        text.push_str(line.trim_end());
        text.push('\n');
    }
    let bytes = csv_out.into_inner().expect("in-memory flush");
    let csv = String::from_utf8(bytes).expect("built from UTF-8 strings");
    Report { text, csv }
}
