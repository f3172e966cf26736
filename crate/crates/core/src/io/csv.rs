//! CSV emitters. Values are written with 15 significant digits and LF line
//! endings, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::RevivalReport;
use crate::error::{Error, Result};
use crate::propagator::DensityField;

/// 15 significant digits in scientific notation.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.14e}")
}

pub fn format_slice_csv(y: &[f64], density: &[f64]) -> Result<String> {
    if y.len() != density.len() {
        return Err(Error::validation(
            "samples",
            format!("{} positions but {} densities", y.len(), density.len()),
        ));
    }
    let mut out = String::with_capacity(48 * (y.len() + 1));
    out.push_str("y,density\n");
    for (a, b) in y.iter().zip(density) {
        let _ = writeln!(out, "{},{}", fmt_value(*a), fmt_value(*b));
    }
    Ok(out)
}

pub fn write_csv_slice(path: &Path, y: &[f64], density: &[f64]) -> Result<()> {
    let text = format_slice_csv(y, density)?;
    write_file(path, text.as_bytes())
}

/// Reads a `y,density` file back.
pub fn parse_slice_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    if lines.next() != Some("y,density") {
        return Err(Error::validation("csv", "expected header `y,density`"));
    }
    let mut y = Vec::new();
    let mut d = Vec::new();
    for (i, line) in lines.enumerate() {
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::validation("csv", format!("line {}: expected two columns", i + 2)))?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::validation("csv", format!("line {}: bad number `{s}`", i + 2)))
        };
        y.push(parse(a)?);
        d.push(parse(b)?);
    }
    Ok((y, d))
}

pub fn read_csv_slice(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_slice_csv(&text)
}

/// Long-form `t,y,density`, rows in time order.
pub fn format_carpet_csv(field: &DensityField) -> String {
    let grid = field.grid();
    let mut out = String::with_capacity(70 * (field.values().len() + 1));
    out.push_str("t,y,density\n");
    for (r, t) in grid.t().iter().enumerate() {
        let ts = fmt_value(*t);
        for (y, d) in grid.y().iter().zip(field.row(r)) {
            let _ = writeln!(out, "{ts},{},{}", fmt_value(*y), fmt_value(*d));
        }
    }
    out
}

pub fn write_carpet_csv(path: &Path, field: &DensityField) -> Result<()> {
    write_file(path, format_carpet_csv(field).as_bytes())
}

pub fn format_report_csv(report: &RevivalReport) -> String {
    let mut out = String::from("time,metric,class\n");
    for h in &report.hits {
        let _ = writeln!(out, "{},{},{}", fmt_value(h.time), fmt_value(h.metric), h.class);
    }
    out
}

pub fn write_report_csv(path: &Path, report: &RevivalReport) -> Result<()> {
    write_file(path, format_report_csv(report).as_bytes())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
