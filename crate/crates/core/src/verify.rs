//! End-to-end numerical checks of the degree inequalities and the sweep
//! driver that estimates their universal constants in the degenerate regimes.
//!
//! Three ratio regimes measure `|deg f|` against a scaled energy:
//!
//! * `hhalf`: `|deg f| / E₂(f)`
//! * `op51`:  `|deg f| / ((p−1)·E_p(f))` on a p-grid refining toward 1
//! * `op53`:  `|deg f| / (δ·I_δ(f))` on a δ-grid refining toward 0
//!
//! plus a `lemmas` regime whose rows replay the power-energy comparison
//! `I_√3(fⁿ) ≤ I_δ(f)` per (family, δ). Each regime is a strategy behind
//! [`ScanRegime`], selected by name at runtime; rows of a scan are
//! independent and may run concurrently, while the report assembler merges
//! them in canonical order so output is schedule-independent.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_map::CircleMap;
use crate::degree::degree;
use crate::energy::{
    energy_p, threshold_energy, threshold_mesh, threshold_pair_on_mesh, EnergyOptions,
    EnergyResult, Scheme,
};
use crate::error::{Error, Result};
use crate::family::{FamilyRegistry, FamilySpec};
use crate::powers::{build_weights, threshold_plan};
use crate::sum::CompensatedSum;

/// Identity-family value of the ratio `|deg g| / E₂(g)`; maps with a
/// single-signed Fourier spectrum attain it exactly, which makes it the
/// reference constant for the chain checks.
pub const HHALF_IDENTITY_RATIO: f64 = 1.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);

/// Headroom applied on top of [`HHALF_IDENTITY_RATIO`] so that quadrature
/// error cannot flip a chain check.
const CHAIN_CALIBRATION: f64 = 1.05;

/// Powers replayed by the small-exponent chain check.
const CHAIN_POWERS: u32 = 16;

const SQRT3: f64 = 1.7320508075688772;

/// Which inequality a scan stresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeKind {
    HHalf,
    Op51,
    Op53,
    Lemmas,
}

impl RegimeKind {
    pub fn name(&self) -> &'static str {
        match self {
            RegimeKind::HHalf => "hhalf",
            RegimeKind::Op51 => "op51",
            RegimeKind::Op53 => "op53",
            RegimeKind::Lemmas => "lemmas",
        }
    }
}

impl fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegimeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "hhalf" => Ok(RegimeKind::HHalf),
            "op51" => Ok(RegimeKind::Op51),
            "op53" => Ok(RegimeKind::Op53),
            "lemmas" => Ok(RegimeKind::Lemmas),
            other => Err(format!(
                "unknown regime '{other}' (expected hhalf, op51, op53 or lemmas)"
            )),
        }
    }
}

/// Output format of a rendered report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    pub fn extension(&self) -> &'static str {
        self.name()
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Validated scan configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub families: Vec<FamilySpec>,
    pub regime: RegimeKind,
    pub p_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub grid_size: usize,
    pub tol: f64,
    pub output_path: String,
    pub format: OutputFormat,
}

impl ScanConfig {
    /// Canonical one-line rendering, the input of [`config_digest`].
    pub fn canonical_string(&self) -> String {
        let families = self
            .families
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let grid = |g: &[f64]| {
            g.iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(";")
        };
        format!(
            "families=[{families}] regime={} p_grid=[{}] delta_grid=[{}] N={} tol={} output={} format={}",
            self.regime,
            grid(&self.p_grid),
            grid(&self.delta_grid),
            self.grid_size,
            self.tol,
            self.output_path,
            self.format,
        )
    }
}

/// FNV-1a digest of the canonical config string, stamped into reports.
pub fn config_digest(config: &ScanConfig) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in config.canonical_string().bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// One evaluated grid point of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub family: String,
    pub params: String,
    pub regime: String,
    pub param_value: f64,
    pub degree: i64,
    pub energy: EnergyResult,
    pub ratio: f64,
    pub notes: String,
}

/// Rows of a scan plus the empirical lower bound for the regime's constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub rows: Vec<RatioRecord>,
    pub sup_ratio: f64,
    pub config_digest: String,
    pub tool_version: String,
}

/// Constant maps give 0/0; report those rows as ratio 0 so they never
/// poison the sup aggregation.
fn safe_ratio(numerator: f64, denominator: f64) -> f64 {
    if numerator == 0.0 && denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

fn record(
    spec: &FamilySpec,
    regime: RegimeKind,
    param_value: f64,
    deg: i64,
    energy: EnergyResult,
    ratio: f64,
    notes: String,
) -> RatioRecord {
    RatioRecord {
        family: spec.tag().to_string(),
        params: spec.params_string(),
        regime: regime.name().to_string(),
        param_value,
        degree: deg,
        energy,
        ratio,
        notes,
    }
}

/// `|deg f| / E₂(f)`.
pub fn ratio_hhalf(spec: &FamilySpec, f: &CircleMap, tol: f64) -> Result<RatioRecord> {
    let deg = degree(f)?.degree;
    let energy = energy_p(f, 2.0, tol)?;
    let ratio = safe_ratio(deg.unsigned_abs() as f64, energy.value);
    Ok(record(
        spec,
        RegimeKind::HHalf,
        2.0,
        deg,
        energy,
        ratio,
        String::new(),
    ))
}

/// `|deg f| / ((p−1)·E_p(f))`.
pub fn ratio_op51(spec: &FamilySpec, f: &CircleMap, p: f64, tol: f64) -> Result<RatioRecord> {
    let deg = degree(f)?.degree;
    let energy = energy_p(f, p, tol)?;
    let ratio = safe_ratio(deg.unsigned_abs() as f64, (p - 1.0) * energy.value);
    Ok(record(
        spec,
        RegimeKind::Op51,
        p,
        deg,
        energy,
        ratio,
        String::new(),
    ))
}

/// `|deg f| / (δ·I_δ(f))`.
pub fn ratio_op53(spec: &FamilySpec, f: &CircleMap, delta: f64, tol: f64) -> Result<RatioRecord> {
    if !(delta > 0.0 && delta <= SQRT3) {
        return Err(Error::InvalidThreshold {
            delta,
            range: "0 < delta <= sqrt(3)",
        });
    }
    let deg = degree(f)?.degree;
    let energy = threshold_energy(f, delta, tol)?;
    let ratio = safe_ratio(deg.unsigned_abs() as f64, delta * energy.value);
    Ok(record(
        spec,
        RegimeKind::Op53,
        delta,
        deg,
        energy,
        ratio,
        String::new(),
    ))
}

/// One power of the small-exponent chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerChainRow {
    pub k: u32,
    pub weight: f64,
    pub e2: EnergyResult,
    /// `k·|deg f| ≤ R·E₂(fᵏ)` with the calibrated reference ratio R.
    pub degree_bound_ok: bool,
}

/// Full audit trail of the weighted-powers chain at one exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallPChainReport {
    pub p: f64,
    pub k_small: u32,
    pub degree: i64,
    pub rows: Vec<PowerChainRow>,
    /// `Σ_{k≤K_small} a_k·E₂(fᵏ)`.
    pub weighted_sum: f64,
    /// `Σ_{k≤K_small} a_k·k`; the full series sums to 1.
    pub first_moment_truncated: f64,
    /// `1 − first_moment_truncated`, the weight mass beyond the replayed powers.
    pub moment_tail: f64,
    /// `(p−1)·E_p(f)`.
    pub ep_scaled: f64,
    /// `weighted_sum / ep_scaled`, an empirical lower bound for the constant
    /// in `Σ a_k E₂(fᵏ) ≤ C·(p−1)·E_p(f)`.
    pub chain_ratio: f64,
    /// `R·weighted_sum / first_moment_truncated`: what the chain proves about
    /// `|deg f|` from the replayed powers alone.
    pub implied_degree_bound: f64,
    pub degree_bound_ok: bool,
}

/// Replays the weighted-powers proof chain numerically for `1 < p ≤ 3/2`:
/// per power `k ≤ K_small` it checks `k·|deg f| ≤ R·E₂(fᵏ)`, then aggregates
/// `Σ a_k·E₂(fᵏ)` against `(p−1)·E_p(f)` and reports the degree bound the
/// truncated chain implies.
pub fn check_small_p_chain(f: &CircleMap, p: f64, tol: f64) -> Result<SmallPChainReport> {
    let scheme = build_weights(p, 1e-6)?;
    let deg = degree(f)?.degree;
    let reference_ratio = HHALF_IDENTITY_RATIO * CHAIN_CALIBRATION;
    let k_small = CHAIN_POWERS.min(scheme.k_max as u32);

    let mut rows = Vec::with_capacity(k_small as usize);
    let mut weighted = CompensatedSum::new();
    let mut moment = CompensatedSum::new();
    for k in 1..=k_small {
        let fk = f.pow(k)?;
        let e2 = energy_p(&fk, 2.0, tol)?;
        let weight = scheme.weights[(k - 1) as usize];
        weighted.add(weight * e2.value);
        moment.add(weight * k as f64);
        rows.push(PowerChainRow {
            k,
            weight,
            e2,
            degree_bound_ok: (k as i64 * deg.abs()) as f64 <= reference_ratio * e2.value + 1e-12,
        });
    }
    let weighted_sum = weighted.total();
    let first_moment_truncated = moment.total();
    let ep = energy_p(f, p, tol)?;
    let ep_scaled = (p - 1.0) * ep.value;
    let implied_degree_bound = if first_moment_truncated > 0.0 {
        reference_ratio * weighted_sum / first_moment_truncated
    } else {
        0.0
    };
    Ok(SmallPChainReport {
        p,
        k_small,
        degree: deg,
        rows,
        weighted_sum,
        first_moment_truncated,
        moment_tail: 1.0 - first_moment_truncated,
        ep_scaled,
        chain_ratio: safe_ratio(weighted_sum, ep_scaled),
        implied_degree_bound,
        degree_bound_ok: deg.unsigned_abs() as f64 <= implied_degree_bound + 1e-9,
    })
}

/// Outcome of the power-energy comparison `I_√3(fⁿ) ≤ I_δ(f)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyComparisonReport {
    pub delta: f64,
    pub n: u64,
    pub degree_base: i64,
    pub degree_power: i64,
    /// `deg(fⁿ) = n·deg f`, checked by integer equality.
    pub degree_identity_ok: bool,
    pub i_sqrt3_power: EnergyResult,
    pub i_delta_base: EnergyResult,
    /// `I_√3(fⁿ) ≤ I_δ(f)` up to summation noise; the indicator-set inclusion
    /// makes this exact per shared mesh cell.
    pub comparison_ok: bool,
    pub slack: f64,
}

/// Builds `g = fⁿ` from the threshold plan for δ and evaluates `I_√3(g)` and
/// `I_δ(f)` on the identical outer mesh with lockstep refinement.
pub fn check_energy_comparison(
    f: &CircleMap,
    delta: f64,
    tol: f64,
) -> Result<EnergyComparisonReport> {
    let plan = threshold_plan(delta)?;
    if plan.n > u32::MAX as u64 {
        return Err(Error::InvalidThreshold {
            delta,
            range: "threshold too small: power exponent would overflow",
        });
    }
    let g = f.pow(plan.n as u32)?;
    let degree_base = degree(f)?.degree;
    let degree_power = degree(&g)?.degree;

    let mesh = threshold_mesh(f, delta)?;
    let opts = EnergyOptions::with_tol(tol);
    let (i_delta_base, i_sqrt3_power) = threshold_pair_on_mesh(f, delta, &g, SQRT3, &mesh, &opts)?;

    let mesh_tol = 1e-12 * i_delta_base.value.max(1.0);
    Ok(EnergyComparisonReport {
        delta,
        n: plan.n,
        degree_base,
        degree_power,
        degree_identity_ok: degree_power == plan.n as i64 * degree_base,
        comparison_ok: i_sqrt3_power.value <= i_delta_base.value + mesh_tol,
        slack: i_delta_base.value - i_sqrt3_power.value,
        i_sqrt3_power,
        i_delta_base,
    })
}

/// One scan regime: which grid it consumes, how a parameter is validated,
/// and how a single (family, parameter) cell becomes a row.
pub trait ScanRegime: Send + Sync {
    fn name(&self) -> &'static str;

    /// Label of the regime parameter (`p` or `delta`).
    fn param_label(&self) -> &'static str;

    /// Constraint check for one grid value, as a plain message for config
    /// validation to aggregate.
    fn validate_param(&self, value: f64) -> std::result::Result<(), String>;

    /// The parameter grid this regime consumes from a config.
    fn grid<'a>(&self, config: &'a ScanConfig) -> &'a [f64];

    fn evaluate(
        &self,
        spec: &FamilySpec,
        map: &CircleMap,
        param: f64,
        tol: f64,
    ) -> Result<RatioRecord>;
}

struct HHalfRegime;
struct Op51Regime;
struct Op53Regime;
struct LemmasRegime;

static HHALF_GRID: [f64; 1] = [2.0];

impl ScanRegime for HHalfRegime {
    fn name(&self) -> &'static str {
        "hhalf"
    }

    fn param_label(&self) -> &'static str {
        "p"
    }

    fn validate_param(&self, _value: f64) -> std::result::Result<(), String> {
        Ok(())
    }

    fn grid<'a>(&self, _config: &'a ScanConfig) -> &'a [f64] {
        &HHALF_GRID
    }

    fn evaluate(
        &self,
        spec: &FamilySpec,
        map: &CircleMap,
        _param: f64,
        tol: f64,
    ) -> Result<RatioRecord> {
        ratio_hhalf(spec, map, tol)
    }
}

impl ScanRegime for Op51Regime {
    fn name(&self) -> &'static str {
        "op51"
    }

    fn param_label(&self) -> &'static str {
        "p"
    }

    fn validate_param(&self, value: f64) -> std::result::Result<(), String> {
        if value.is_finite() && value > 1.0 && value <= 2.0 {
            Ok(())
        } else {
            Err(format!("p = {value} outside the open-left interval (1, 2]"))
        }
    }

    fn grid<'a>(&self, config: &'a ScanConfig) -> &'a [f64] {
        &config.p_grid
    }

    fn evaluate(
        &self,
        spec: &FamilySpec,
        map: &CircleMap,
        param: f64,
        tol: f64,
    ) -> Result<RatioRecord> {
        ratio_op51(spec, map, param, tol)
    }
}

impl ScanRegime for Op53Regime {
    fn name(&self) -> &'static str {
        "op53"
    }

    fn param_label(&self) -> &'static str {
        "delta"
    }

    fn validate_param(&self, value: f64) -> std::result::Result<(), String> {
        if value.is_finite() && value > 0.0 && value <= SQRT3 {
            Ok(())
        } else {
            Err(format!("delta = {value} outside (0, sqrt(3)]"))
        }
    }

    fn grid<'a>(&self, config: &'a ScanConfig) -> &'a [f64] {
        &config.delta_grid
    }

    fn evaluate(
        &self,
        spec: &FamilySpec,
        map: &CircleMap,
        param: f64,
        tol: f64,
    ) -> Result<RatioRecord> {
        ratio_op53(spec, map, param, tol)
    }
}

impl ScanRegime for LemmasRegime {
    fn name(&self) -> &'static str {
        "lemmas"
    }

    fn param_label(&self) -> &'static str {
        "delta"
    }

    fn validate_param(&self, value: f64) -> std::result::Result<(), String> {
        if value.is_finite() && value > 0.0 && value <= SQRT3 {
            Ok(())
        } else {
            Err(format!("delta = {value} outside (0, sqrt(3)]"))
        }
    }

    fn grid<'a>(&self, config: &'a ScanConfig) -> &'a [f64] {
        &config.delta_grid
    }

    /// Rows of the lemma regime carry the comparison ratio
    /// `I_√3(fⁿ)/I_δ(f)` (at most 1 when the inclusion holds) instead of a
    /// degree ratio.
    fn evaluate(
        &self,
        spec: &FamilySpec,
        map: &CircleMap,
        param: f64,
        tol: f64,
    ) -> Result<RatioRecord> {
        let report = check_energy_comparison(map, param, tol)?;
        let ratio = safe_ratio(report.i_sqrt3_power.value, report.i_delta_base.value);
        let notes = if report.degree_identity_ok && report.comparison_ok {
            format!(
                "energy_comparison ok n={} slack={:.6e}",
                report.n, report.slack
            )
        } else {
            format!(
                "VIOLATION degree_ok={} comparison_ok={} n={} slack={:.6e}",
                report.degree_identity_ok, report.comparison_ok, report.n, report.slack
            )
        };
        Ok(record(
            spec,
            RegimeKind::Lemmas,
            param,
            report.degree_base,
            report.i_delta_base,
            ratio,
            notes,
        ))
    }
}

static HHALF: HHalfRegime = HHalfRegime;
static OP51: Op51Regime = Op51Regime;
static OP53: Op53Regime = Op53Regime;
static LEMMAS: LemmasRegime = LemmasRegime;

/// All registered regimes.
pub fn regimes() -> [&'static dyn ScanRegime; 4] {
    [&HHALF, &OP51, &OP53, &LEMMAS]
}

/// Looks a regime up by its runtime name.
pub fn regime_by_name(name: &str) -> Option<&'static dyn ScanRegime> {
    regimes().into_iter().find(|r| r.name() == name)
}

pub fn regime_for(kind: RegimeKind) -> &'static dyn ScanRegime {
    match kind {
        RegimeKind::HHalf => &HHALF,
        RegimeKind::Op51 => &OP51,
        RegimeKind::Op53 => &OP53,
        RegimeKind::Lemmas => &LEMMAS,
    }
}

/// The family suite used by the lemma checks and the acceptance sweeps.
pub fn standard_suite() -> Vec<FamilySpec> {
    [
        "constant",
        "power:d=1",
        "power:d=2",
        "power:d=3",
        "power:d=4",
        "power:d=5",
        "perturbed:d=1,eps=0.5,m=3",
        "perturbed:d=2,eps=0.3,m=5",
        "blaschke:a_modulus=0.5,a_angle=0",
        "blaschke:a_modulus=0.95,a_angle=0",
    ]
    .iter()
    .map(|s| FamilySpec::parse(s).expect("suite specs are well-formed"))
    .collect()
}

/// Reduced suite for quick smoke checks.
pub fn fast_suite() -> Vec<FamilySpec> {
    ["power:d=1", "power:d=2", "perturbed:d=1,eps=0.5,m=3"]
        .iter()
        .map(|s| FamilySpec::parse(s).expect("suite specs are well-formed"))
        .collect()
}

fn error_row(
    spec: &FamilySpec,
    regime: &dyn ScanRegime,
    param: f64,
    grid_size: usize,
    err: &Error,
) -> RatioRecord {
    RatioRecord {
        family: spec.tag().to_string(),
        params: spec.params_string(),
        regime: regime.name().to_string(),
        param_value: param,
        degree: 0,
        energy: EnergyResult {
            value: 0.0,
            error_estimate: 0.0,
            scheme: Scheme::Graded,
            grid_size,
            refinement_levels: 0,
        },
        ratio: 0.0,
        notes: format!("error: {err}"),
    }
}

/// Evaluates the configured regime across families × parameter grid.
///
/// Rows are computed concurrently, assembled in canonical order, and
/// per-row errors land in the notes column without aborting the scan; the
/// result is a pure function of the config.
pub fn scan(config: &ScanConfig) -> ScanReport {
    let regime = regime_for(config.regime);
    let registry = FamilyRegistry::standard();

    let jobs: Vec<(&FamilySpec, f64)> = config
        .families
        .iter()
        .flat_map(|spec| regime.grid(config).iter().map(move |&param| (spec, param)))
        .collect();

    let mut rows: Vec<RatioRecord> = jobs
        .par_iter()
        .map(|&(spec, param)| {
            registry
                .build(spec, config.grid_size)
                .and_then(|map| regime.evaluate(spec, &map, param, config.tol))
                .unwrap_or_else(|err| error_row(spec, regime, param, config.grid_size, &err))
        })
        .collect();

    rows.sort_by(|a, b| {
        (&a.family, &a.params)
            .cmp(&(&b.family, &b.params))
            .then(a.param_value.total_cmp(&b.param_value))
    });
    let sup_ratio = rows
        .iter()
        .map(|r| r.ratio)
        .filter(|r| r.is_finite())
        .fold(0.0_f64, f64::max);

    ScanReport {
        rows,
        sup_ratio,
        config_digest: config_digest(config),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}
