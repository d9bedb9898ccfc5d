//! Report rendering and atomic file writes.

use std::fs;
use std::io;
use std::path::Path;

use deglab::verify::{OutputFormat, ScanReport};

/// Fixed CSV header.
pub const CSV_HEADER: &str =
    "family,params,regime,param_value,degree,energy_value,energy_error,ratio,notes";

/// 12 significant digits, deterministic across runs.
fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(report: &ScanReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            csv_field(&row.family),
            csv_field(&row.params),
            csv_field(&row.regime),
            fmt_float(row.param_value),
            row.degree,
            fmt_float(row.energy.value),
            fmt_float(row.energy.error_estimate),
            fmt_float(row.ratio),
            csv_field(&row.notes),
        ));
    }
    out
}

pub fn render_json(report: &ScanReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serialization is infallible");
    out.push('\n');
    out
}

pub fn render(report: &ScanReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(report),
        OutputFormat::Json => render_json(report),
    }
}

/// Writes through a temp file and renames, so partial output never lands
/// under the target name.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    fs::write(tmp, contents)?;
    fs::rename(tmp, path)
}
