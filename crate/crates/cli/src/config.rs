//! On-disk scan configuration: a single JSON object with the canonical key
//! names `families`, `regime`, `p_grid`, `delta_grid`, `N`, `tol`,
//! `output_path`, `format`. Unknown keys are rejected.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use deglab::family::{FamilyRegistry, FamilySpec};
use deglab::verify::{regime_for, OutputFormat, RegimeKind, ScanConfig};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScanConfig {
    families: Vec<String>,
    regime: String,
    #[serde(default)]
    p_grid: Option<Vec<f64>>,
    #[serde(default)]
    delta_grid: Option<Vec<f64>>,
    #[serde(rename = "N")]
    n: usize,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    output_path: Option<String>,
    #[serde(default)]
    format: Option<String>,
}

#[derive(Debug)]
pub enum ConfigError {
    /// Malformed document, with line/column context from the parser.
    Parse(String),
    /// Well-formed document violating constraints; every violation listed.
    Validation(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "config parse error: {msg}"),
            ConfigError::Validation(problems) => {
                writeln!(f, "config validation failed:")?;
                for p in problems {
                    writeln!(f, "  - {p}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parses and validates a config document into a runnable [`ScanConfig`].
pub fn parse_config(text: &str) -> Result<ScanConfig, ConfigError> {
    let raw: RawScanConfig = serde_json::from_str(text).map_err(|e| {
        ConfigError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;

    let mut problems = Vec::new();

    let regime = match RegimeKind::from_str(&raw.regime) {
        Ok(kind) => Some(kind),
        Err(msg) => {
            problems.push(msg);
            None
        }
    };

    let registry = FamilyRegistry::standard();
    let mut families = Vec::with_capacity(raw.families.len());
    for entry in &raw.families {
        match FamilySpec::parse(entry) {
            Ok(spec) => match registry.validate_spec(&spec) {
                Ok(()) => families.push(spec),
                Err(e) => problems.push(format!("family '{entry}': {e}")),
            },
            Err(e) => problems.push(e.to_string()),
        }
    }

    if raw.n < 64 {
        problems.push(format!("N = {} too small: need N >= 64", raw.n));
    }
    let tol = raw.tol.unwrap_or(1e-4);
    if !(tol.is_finite() && tol > 0.0) {
        problems.push(format!("tol = {tol} must be a positive finite number"));
    }

    let p_grid = raw.p_grid.unwrap_or_default();
    let delta_grid = raw.delta_grid.unwrap_or_default();
    // Grid entries are validated against their regime's admissible interval
    // no matter which regime consumes them.
    let p_regime = regime_for(RegimeKind::Op51);
    for &p in &p_grid {
        if let Err(msg) = p_regime.validate_param(p) {
            problems.push(format!("p_grid: {msg}"));
        }
    }
    let delta_regime = regime_for(RegimeKind::Op53);
    for &delta in &delta_grid {
        if let Err(msg) = delta_regime.validate_param(delta) {
            problems.push(format!("delta_grid: {msg}"));
        }
    }
    if let Some(kind) = regime {
        let needs = match kind {
            RegimeKind::Op51 => Some(("p_grid", p_grid.is_empty())),
            RegimeKind::Op53 | RegimeKind::Lemmas => Some(("delta_grid", delta_grid.is_empty())),
            RegimeKind::HHalf => None,
        };
        if let Some((grid_name, empty)) = needs {
            if empty {
                problems.push(format!("regime '{kind}' requires a nonempty {grid_name}"));
            }
        }
    }

    let format = match raw.format.as_deref() {
        None => Some(OutputFormat::Csv),
        Some(s) => match OutputFormat::from_str(s) {
            Ok(f) => Some(f),
            Err(msg) => {
                problems.push(msg);
                None
            }
        },
    };

    let output_path = match raw.output_path {
        Some(path) if path.is_empty() => {
            problems.push("output_path must not be empty".to_string());
            None
        }
        Some(path) => Some(path),
        None => format.map(|f| format!("scan_report.{}", f.extension())),
    };

    if !problems.is_empty() {
        return Err(ConfigError::Validation(problems));
    }
    Ok(ScanConfig {
        families,
        regime: regime.expect("validated above"),
        p_grid,
        delta_grid,
        grid_size: raw.n,
        tol,
        output_path: output_path.expect("validated above"),
        format: format.expect("validated above"),
    })
}
