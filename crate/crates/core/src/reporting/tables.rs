//! JSON and CSV serialization of reports.
//!
//! JSON output is key-sorted and pretty-printed; floats use the shortest
//! representation that round-trips, so identical reports give identical bytes.

use serde::Serialize;

use crate::aggregation::{ComparisonReport, IndexReport, TotalsReport};
use crate::error::Result;
use crate::indexes::scalar_key_order;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

/// Key-sorted pretty JSON with a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

fn fmt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).map_err(std::io::Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn sorted_keys<'a>(keys: impl Iterator<Item = &'a String>) -> Vec<&'a String> {
    let mut k: Vec<&String> = keys.collect();
    k.sort_by_key(|k| scalar_key_order(k));
    k
}

/// `index,value` rows: globals, then each local field's max and mean.
pub fn report_csv(report: &IndexReport) -> Result<String> {
    let scalars = report.scalars();
    let mut rows = vec![vec!["index".to_string(), "value".to_string()]];
    for k in sorted_keys(scalars.keys()) {
        rows.push(vec![k.clone(), fmt(Some(scalars[k]))]);
    }
    csv_string(rows)
}

/// One column per module plus `total`, with a leading weight row.
pub fn totals_csv(report: &TotalsReport) -> Result<String> {
    let mut header = vec!["index".to_string()];
    header.extend(report.modules.iter().map(|m| m.id.clone()));
    header.push("total".to_string());
    let mut rows = vec![header];
    let mut weights = vec!["weight".to_string()];
    weights.extend(report.modules.iter().map(|m| fmt(m.weight)));
    weights.push(String::new());
    rows.push(weights);

    let mut keys: Vec<&String> = report.modules.iter().flat_map(|m| m.scalars.keys()).collect();
    keys.sort_by_key(|k| scalar_key_order(k));
    keys.dedup();
    for k in keys {
        let mut row = vec![k.clone()];
        row.extend(report.modules.iter().map(|m| fmt(m.scalars.get(k).copied())));
        row.push(fmt(report.totals.get(k).copied()));
        rows.push(row);
    }
    csv_string(rows)
}

/// `id,baseline,candidate,delta,percent`; side-by-side rows leave delta and
/// percent empty.
pub fn comparison_csv(report: &ComparisonReport) -> Result<String> {
    let mut rows = vec![["id", "baseline", "candidate", "delta", "percent"]
        .map(String::from)
        .to_vec()];
    for r in &report.rows {
        rows.push(vec![
            r.id.clone(),
            fmt(Some(r.baseline)),
            fmt(Some(r.candidate)),
            fmt(Some(r.delta)),
            fmt(r.percent),
        ]);
    }
    for r in &report.side_by_side {
        rows.push(vec![
            r.id.clone(),
            fmt(r.baseline),
            fmt(r.candidate),
            String::new(),
            String::new(),
        ]);
    }
    csv_string(rows)
}

/// Any report, rendered in `format`.
pub enum AnyReport<'a> {
    Index(&'a IndexReport),
    Totals(&'a TotalsReport),
    Comparison(&'a ComparisonReport),
}

pub fn render_report(report: AnyReport<'_>, format: ReportFormat) -> Result<String> {
    match (report, format) {
        (AnyReport::Index(r), ReportFormat::Json) => to_sorted_json(r),
        (AnyReport::Totals(r), ReportFormat::Json) => to_sorted_json(r),
        (AnyReport::Comparison(r), ReportFormat::Json) => to_sorted_json(r),
        (AnyReport::Index(r), ReportFormat::Csv) => report_csv(r),
        (AnyReport::Totals(r), ReportFormat::Csv) => totals_csv(r),
        (AnyReport::Comparison(r), ReportFormat::Csv) => comparison_csv(r),
    }
}

pub fn emit_report(
    report: AnyReport<'_>,
    path: impl AsRef<std::path::Path>,
    format: ReportFormat,
) -> Result<()> {
    let text = render_report(report, format)?;
    super::write_atomic(path.as_ref(), text.as_bytes())
}
