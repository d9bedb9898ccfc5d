//! Shared helpers for the integration suites.
// Each test target compiles this module separately and uses a subset.
#![allow(dead_code)]

use deglab::circle_map::{CircleMap, TAU};

/// Independent winding-number oracle: sums wrapped increments of the
/// principal argument of the complex sample values around the loop. Uses
/// only `e^{iθ}`, never the stored lift, so it cannot share bugs with the
/// lift-based degree path.
pub fn degree_by_argument_increment(f: &CircleMap) -> i64 {
    let args: Vec<f64> = f
        .phases()
        .iter()
        .map(|&t| num_complex::Complex64::from_polar(1.0, t).arg())
        .collect();
    let n = args.len();
    let wrap = |x: f64| x - TAU * (x / TAU).round();
    let mut total = 0.0;
    for i in 0..n {
        total += wrap(args[(i + 1) % n] - args[i]);
    }
    (total / TAU).round() as i64
}

pub fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}
