//! CSV and JSON emission of correlation curves, and the matching reader.
//!
//! Both formats carry the columns `tau,g1_re,g1_im,g2[,g1_err,g2_err]` with
//! every number printed to 17 significant digits, so a value read back from
//! either file is bit-identical to the one written.

use std::io::Write;
use std::path::Path;

use g2kit_core::{Complex, CorrelationCurve};
use serde::Deserialize;

use crate::config::Format;
use crate::error::CliError;

const BASE_COLUMNS: [&str; 4] = ["tau", "g1_re", "g1_im", "g2"];
const ERROR_COLUMNS: [&str; 2] = ["g1_err", "g2_err"];

/// Scientific form with 17 significant digits. Negative zero prints as zero.
pub fn format_number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn header(curve: &CorrelationCurve) -> Vec<&'static str> {
    let mut cols = BASE_COLUMNS.to_vec();
    if curve.has_errors() {
        cols.extend(ERROR_COLUMNS);
    }
    cols
}

/// One row of cells, `None` for an absent g2.
fn cells(curve: &CorrelationCurve, k: usize) -> Vec<Option<String>> {
    let mut row = vec![
        Some(format_number(curve.tau_grid[k])),
        Some(format_number(curve.g1[k].re)),
        Some(format_number(curve.g1[k].im)),
        curve.g2.as_ref().map(|g2| format_number(g2[k])),
    ];
    if let (Some(e1), Some(e2)) = (&curve.g1_err, &curve.g2_err) {
        row.push(Some(format_number(e1[k])));
        row.push(Some(format_number(e2[k])));
    }
    row
}

pub fn write_csv(curve: &CorrelationCurve, out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(curve))?;
    for k in 0..curve.len() {
        w.write_record(cells(curve, k).into_iter().map(Option::unwrap_or_default))?;
    }
    w.flush()
}

pub fn write_json(curve: &CorrelationCurve, mut out: impl Write) -> std::io::Result<()> {
    let names = header(curve);
    writeln!(out, "[")?;
    for k in 0..curve.len() {
        let fields: Vec<String> = names
            .iter()
            .zip(cells(curve, k))
            .map(|(name, cell)| format!("\"{name}\": {}", cell.as_deref().unwrap_or("null")))
            .collect();
        let sep = if k + 1 < curve.len() { "," } else { "" };
        writeln!(out, "  {{{}}}{sep}", fields.join(", "))?;
    }
    writeln!(out, "]")
}

pub fn write_curve(curve: &CorrelationCurve, format: Format, out: impl Write) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(curve, out),
        Format::Json => write_json(curve, out),
    }
}

pub fn render(curve: &CorrelationCurve, format: Format) -> String {
    let mut buf = Vec::new();
    write_curve(curve, format, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("curve output is ASCII")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    tau: f64,
    g1_re: f64,
    g1_im: f64,
    g2: Option<f64>,
    g1_err: Option<f64>,
    g2_err: Option<f64>,
}

/// Parses a curve written by [`write_csv`] or [`write_json`].
///
/// JSON is recognized by a leading `[`. The occupation used for
/// normalization is not stored in the file, so `n_ss` is NaN.
pub fn parse_curve(text: &str) -> Result<CorrelationCurve, CliError> {
    let rows = if text.trim_start().starts_with('[') { parse_json(text)? } else { parse_csv(text)? };
    assemble(rows)
}

pub fn read_curve(path: &Path) -> Result<CorrelationCurve, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    parse_curve(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn parse_json(text: &str) -> Result<Vec<Row>, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::config(format!("malformed curve JSON: {e}")))
}

fn parse_csv(text: &str) -> Result<Vec<Row>, CliError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::config(format!("malformed curve CSV: {e}")))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let full: Vec<&str> = BASE_COLUMNS.iter().chain(&ERROR_COLUMNS).copied().collect();
    if names != BASE_COLUMNS && names != full {
        return Err(CliError::config(format!("unexpected CSV header {:?}", names.join(","))));
    }
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| CliError::config(format!("malformed curve CSV row {}: {e}", i + 1))))
        .collect()
}

/// Columns must be present on every row or on none.
fn column(rows: &[Row], name: &str, get: impl Fn(&Row) -> Option<f64>) -> Result<Option<Vec<f64>>, CliError> {
    let values: Vec<Option<f64>> = rows.iter().map(get).collect();
    if values.iter().all(Option::is_none) {
        Ok(None)
    } else if values.iter().all(Option::is_some) {
        Ok(Some(values.into_iter().flatten().collect()))
    } else {
        Err(CliError::config(format!("column {name} is missing on some rows")))
    }
}

fn assemble(rows: Vec<Row>) -> Result<CorrelationCurve, CliError> {
    if rows.is_empty() {
        return Err(CliError::config("curve file has no rows"));
    }
    let g2 = column(&rows, "g2", |r| r.g2)?;
    let g1_err = column(&rows, "g1_err", |r| r.g1_err)?;
    let g2_err = column(&rows, "g2_err", |r| r.g2_err)?;
    let curve = CorrelationCurve {
        tau_grid: rows.iter().map(|r| r.tau).collect(),
        g1: rows.iter().map(|r| Complex::new(r.g1_re, r.g1_im)).collect(),
        g2,
        g1_err,
        g2_err,
        n_ss: f64::NAN,
    };
    curve.validate().map_err(|e| CliError::config(format!("invalid curve: {e}")))?;
    Ok(curve)
}
