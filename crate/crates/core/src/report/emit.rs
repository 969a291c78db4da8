use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::OutputFormat;
use super::pipeline::RunReport;

/// `v` with 12 significant digits, in the style of C's `%.12g`.
pub fn format_sig12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig12).unwrap_or_default()
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => io_error(path, source),
        other => Error::Serialization(format!("{other:?}")),
    }
}

/// The report body as pretty JSON; this is the byte-stable part.
pub fn body_json(report: &RunReport) -> Result<String> {
    serde_json::to_string_pretty(&report.body).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn report_json(report: &RunReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn parse_report_json(text: &str) -> Result<RunReport> {
    serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
}

pub const CONSTANTS_HEADER: [&str; 8] = ["cone", "n", "mu", "mu0", "sigma", "gamma_plus", "gamma_minus", "lambda"];

fn write_table(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Writes `report.json` and/or `constants.csv`, `convergence.csv` and
/// `verification.csv` into `dir`, returning the paths written.
pub fn emit_report(report: &RunReport, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut written = Vec::new();
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let path = dir.join("report.json");
        fs::write(&path, report_json(report)? + "\n").map_err(|e| io_error(&path, e))?;
        written.push(path);
    }
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let body = &report.body;
        let label = &body.cone.label;
        let path = dir.join("constants.csv");
        let rows = body
            .constants
            .iter()
            .map(|c| {
                vec![
                    label.clone(),
                    c.n.to_string(),
                    format_sig12(c.mu),
                    format_sig12(c.mu0),
                    format_sig12(c.sigma),
                    format_sig12(c.gamma_plus),
                    format_sig12(c.gamma_minus),
                    format_sig12(c.lambda),
                ]
            })
            .collect();
        write_table(&path, &CONSTANTS_HEADER, rows)?;
        written.push(path);

        let path = dir.join("convergence.csv");
        let rows = body
            .convergence
            .iter()
            .map(|r| {
                vec![
                    r.quantity.clone(),
                    opt(r.mu),
                    r.level.to_string(),
                    format_sig12(r.mesh_size),
                    r.unknowns.to_string(),
                    format_sig12(r.value),
                    opt(r.ratio),
                    format_sig12(r.extrapolated),
                ]
            })
            .collect();
        write_table(&path, &["quantity", "mu", "level", "mesh_size", "unknowns", "value", "ratio", "extrapolated"], rows)?;
        written.push(path);

        let path = dir.join("verification.csv");
        let rows = body
            .verification
            .iter()
            .map(|v| {
                let r = &v.report;
                vec![
                    r.check.clone(),
                    opt(v.mu),
                    format!("{:?}", r.verdict).to_lowercase(),
                    format_sig12(r.min_margin()),
                    format_sig12(r.quadrature_error),
                    r.margins.len().to_string(),
                    r.flags.join("; "),
                ]
            })
            .collect();
        write_table(&path, &["check", "mu", "verdict", "min_margin", "quadrature_error", "margins", "flags"], rows)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig12(2.25), "2.25");
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(-123456.7890123456), "-123456.789012");
        assert_eq!(format_sig12(1.5e-9), "1.5e-9");
        assert_eq!(format_sig12(6.02214076e23), "6.02214076e23");
        assert_eq!(format_sig12(1e12), "1e12");
    }
}
