//! Subcommand implementations. Each returns a process exit code.

use std::f64::consts::PI;
use std::path::Path;

use clap::ValueEnum;

use deglab::circle_map::{CircleMap, UnitPoint};
use deglab::energy::{
    closed_form_identity_e2, closed_form_identity_ep, closed_form_identity_idelta, energy_p,
    energy_p_oracle, threshold_energy,
};
use deglab::family::FamilyRegistry;
use deglab::powers::{
    build_weights, check_separation_implication, threshold_plan, weighted_kernel, zeta_partial,
};
use deglab::verify::{
    check_energy_comparison, fast_suite, scan, standard_suite, OutputFormat, ScanReport,
};

use crate::config::{parse_config, ConfigError};
use crate::exit_code;
use crate::output::{render, write_atomic};

const SQRT3: f64 = 1.7320508075688772;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Standard,
    Fast,
}

/// `scan --config <path>`: run the configured sweep and write the report.
pub fn run_scan(config_path: &Path) -> i32 {
    let text = match std::fs::read_to_string(config_path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("cannot read config {}: {e}", config_path.display());
            return exit_code::CONFIG;
        }
    };
    let config = match parse_config(&text) {
        Ok(config) => config,
        Err(e @ ConfigError::Parse(_)) | Err(e @ ConfigError::Validation(_)) => {
            eprintln!("{e}");
            return exit_code::CONFIG;
        }
    };

    let report = scan(&config);
    let rendered = render(&report, config.format);
    let path = Path::new(&config.output_path);
    if let Err(e) = write_atomic(path, &rendered) {
        eprintln!("cannot write report {}: {e}", path.display());
        return exit_code::CHECK_FAILED;
    }
    println!(
        "scan: {} rows, sup_ratio = {:.6e}, report written to {}",
        report.rows.len(),
        report.sup_ratio,
        path.display()
    );

    let failed_rows: Vec<_> = report
        .rows
        .iter()
        .filter(|r| r.notes.starts_with("error:"))
        .collect();
    if failed_rows.is_empty() {
        exit_code::OK
    } else {
        for row in &failed_rows {
            eprintln!(
                "row {}:{} {}={}: {}",
                row.family, row.params, row.regime, row.param_value, row.notes
            );
        }
        if failed_rows
            .iter()
            .any(|r| r.notes.contains("no convergence"))
        {
            exit_code::NUMERIC
        } else {
            exit_code::CHECK_FAILED
        }
    }
}

struct CheckSummary {
    failures: u32,
}

impl CheckSummary {
    fn new() -> Self {
        Self { failures: 0 }
    }

    fn report(&mut self, name: &str, pass: bool, details: &str) {
        if pass {
            println!("check {name}: PASS ({details})");
        } else {
            self.failures += 1;
            println!("check {name}: FAIL ({details})");
        }
    }

    fn exit(self) -> i32 {
        if self.failures == 0 {
            println!("check-lemmas: all checks passed");
            exit_code::OK
        } else {
            println!("check-lemmas: {} check(s) failed", self.failures);
            exit_code::CHECK_FAILED
        }
    }
}

/// `check-lemmas`: separation implication, weighted-kernel grid, pointwise
/// chord bound, and the power-energy comparison across the suite.
pub fn run_check_lemmas(suite: Suite) -> i32 {
    let mut summary = CheckSummary::new();

    let (deltas, angle_grid): (&[f64], usize) = match suite {
        Suite::Standard => (&[1e-3, 1e-2, 0.1, 0.5, 1.0, SQRT3], 100_000),
        Suite::Fast => (&[1e-2, 0.5, SQRT3], 10_000),
    };
    for &delta in deltas {
        match threshold_plan(delta) {
            Ok(plan) => {
                let violations = check_separation_implication(&plan, angle_grid);
                summary.report(
                    &format!("separation delta={delta}"),
                    violations.is_empty(),
                    &format!(
                        "n={}, {} violations on {} angles",
                        plan.n,
                        violations.len(),
                        angle_grid
                    ),
                );
            }
            Err(e) => summary.report(&format!("separation delta={delta}"), false, &e.to_string()),
        }
    }

    let (p_set, chord_grid, tail_tol): (&[f64], usize, f64) = match suite {
        Suite::Standard => (&[1.001, 1.01, 1.1, 1.25, 1.5], 720, 1e-6),
        Suite::Fast => (&[1.01, 1.25], 180, 1e-5),
    };
    let mut sups = Vec::new();
    for &p in p_set {
        match build_weights(p, tail_tol) {
            Ok(ws) => {
                let mut sup = 0.0_f64;
                for j in 1..chord_grid {
                    let delta_angle = std::f64::consts::TAU * j as f64 / chord_grid as f64;
                    let z = UnitPoint::new(delta_angle);
                    let w = UnitPoint::new(0.0);
                    let chord = z.chord_to(w);
                    let bound = weighted_kernel(&ws, z, w);
                    sup = sup.max(bound.upper / ((p - 1.0) * chord.powf(p)));
                }
                let moment = ws.truncated_first_moment();
                let moment_ok =
                    moment <= 1.0 + 1e-12 && moment >= 1.0 - ws.tail_first_moment - 1e-12;
                summary.report(
                    &format!("weighted-kernel p={p}"),
                    sup.is_finite() && moment_ok,
                    &format!(
                        "sup ratio {sup:.4}, K={}, first moment {moment:.9}",
                        ws.k_max
                    ),
                );
                sups.push(sup);
            }
            Err(e) => summary.report(&format!("weighted-kernel p={p}"), false, &e.to_string()),
        }
    }
    if sups.len() > 1 {
        let max = sups.iter().cloned().fold(f64::MIN, f64::max);
        let min = sups.iter().cloned().fold(f64::MAX, f64::min);
        summary.report(
            "weighted-kernel stability",
            max / min <= 3.0,
            &format!(
                "sup range [{min:.4}, {max:.4}], spread factor {:.3}",
                max / min
            ),
        );
    }

    let pair_grid = if suite == Suite::Standard { 100 } else { 30 };
    for &p in &[1.1, 1.5, 2.0] {
        let factor = 2.0_f64.powf(2.0 - p);
        let mut violations = 0u32;
        for i in 0..pair_grid {
            for j in 0..pair_grid {
                let z = UnitPoint::new(std::f64::consts::TAU * i as f64 / pair_grid as f64);
                let w = UnitPoint::new(std::f64::consts::TAU * j as f64 / pair_grid as f64);
                let c = z.chord_to(w);
                if c * c > factor * c.powf(p) * (1.0 + 1e-12) {
                    violations += 1;
                }
            }
        }
        summary.report(
            &format!("chord-bound p={p}"),
            violations == 0,
            &format!("{violations} violations on {} pairs", pair_grid * pair_grid),
        );
    }

    let registry = FamilyRegistry::standard();
    let (families, comparison_deltas): (Vec<_>, &[f64]) = match suite {
        Suite::Standard => (standard_suite(), &[0.1, 0.5, 1.0]),
        Suite::Fast => (fast_suite(), &[0.5]),
    };
    for spec in &families {
        for &delta in comparison_deltas {
            let name = format!("energy-comparison {spec} delta={delta}");
            let outcome = threshold_plan(delta)
                .and_then(|plan| registry.suggested_grid_size(spec, plan.n as u32))
                .and_then(|n| registry.build(spec, n))
                .and_then(|map| check_energy_comparison(&map, delta, 2e-3));
            match outcome {
                Ok(report) => summary.report(
                    &name,
                    report.degree_identity_ok && report.comparison_ok,
                    &format!(
                        "n={}, I_sqrt3(f^n)={:.6e} <= I_delta(f)={:.6e}",
                        report.n, report.i_sqrt3_power.value, report.i_delta_base.value
                    ),
                ),
                Err(e) => summary.report(&name, false, &e.to_string()),
            }
        }
    }

    summary.exit()
}

/// `oracle-selftest`: quadrature against every closed form.
pub fn run_oracle_selftest(n: usize) -> i32 {
    let identity = match CircleMap::power(1, n) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("cannot build identity map at N = {n}: {e}");
            return exit_code::CONFIG;
        }
    };
    let tol = 1e-5;

    let mut checks: Vec<(String, Result<f64, deglab::Error>, f64)> = Vec::new();
    checks.push((
        "E_2(identity)".into(),
        energy_p(&identity, 2.0, tol).map(|e| e.value),
        closed_form_identity_e2(1),
    ));
    for d in 2..=5_u32 {
        checks.push((
            format!("E_2(power d={d})"),
            CircleMap::power(d as i64, n.max(64 * d as usize))
                .and_then(|f| energy_p(&f, 2.0, tol))
                .map(|e| e.value),
            closed_form_identity_e2(d),
        ));
    }
    for p in [1.5, 1.25, 1.1, 1.001] {
        checks.push((
            format!("E_p(identity) p={p}"),
            energy_p(&identity, p, tol).map(|e| e.value),
            closed_form_identity_ep(p).expect("p in range"),
        ));
    }
    for delta in [0.01, 0.1, 0.5, 1.0, SQRT3] {
        checks.push((
            format!("I_delta(identity) delta={delta}"),
            threshold_energy(&identity, delta, tol).map(|e| e.value),
            closed_form_identity_idelta(delta).expect("delta in range"),
        ));
    }
    checks.push((
        "tensor oracle E_2(identity)".into(),
        energy_p_oracle(&identity, 2.0, n).map(|e| e.value),
        closed_form_identity_e2(1),
    ));
    checks.push((
        "zeta(2)".into(),
        zeta_partial(2.0, 1e-10).map(|z| z.value),
        PI * PI / 6.0,
    ));

    let mut max_rel = 0.0_f64;
    let mut failures = 0u32;
    for (name, value, reference) in &checks {
        match value {
            Ok(v) => {
                let rel = (v - reference).abs() / reference.abs().max(f64::MIN_POSITIVE);
                max_rel = max_rel.max(rel);
                println!(
                    "selftest {name}: value {v:.10e} reference {reference:.10e} rel_err {rel:.3e}"
                );
            }
            Err(e) => {
                failures += 1;
                println!("selftest {name}: ERROR {e}");
            }
        }
    }

    println!("selftest max relative error: {max_rel:.3e}");
    if failures == 0 && max_rel <= 0.01 {
        println!("oracle-selftest: PASS");
        exit_code::OK
    } else {
        println!("oracle-selftest: FAIL");
        exit_code::CHECK_FAILED
    }
}

/// `report --in <path> --format csv|json`: reformat a JSON report.
pub fn run_report(input: &Path, format: OutputFormat) -> i32 {
    let text = match std::fs::read_to_string(input) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("cannot read report {}: {e}", input.display());
            return exit_code::CONFIG;
        }
    };
    let report: ScanReport = match serde_json::from_str(&text) {
        Ok(report) => report,
        Err(e) => {
            eprintln!(
                "cannot parse {} as a JSON scan report (line {}, column {}): {e}",
                input.display(),
                e.line(),
                e.column()
            );
            return exit_code::CONFIG;
        }
    };
    print!("{}", render(&report, format));
    exit_code::OK
}
