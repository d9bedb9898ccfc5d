//! Constructive machinery for the two degree bounds: normalized power
//! weights with certified truncation, and the threshold plan that converts a
//! chord threshold δ into the fixed threshold √3 via a single power.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circle_map::UnitPoint;
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// `ζ(p)` approximation with a certified error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaEstimate {
    pub value: f64,
    pub error_bound: f64,
}

/// `Σ_{j≥1} j^{−p}` by partial sum plus midpoint-integral tail.
///
/// The truncation index is chosen so that the certified bound
/// `p·(M−1/2)^{−p−1}/12` on the tail error is at most `tol`. The result is
/// checked against the analytic lower bound `ζ(p) ≥ ∫₁^∞ t^{−p} dt = 1/(p−1)`.
pub fn zeta_partial(p: f64, tol: f64) -> Result<ZetaEstimate> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidExponent { p, range: "p > 1" });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            requirement: "must be positive",
        });
    }

    let m_real = (p / (12.0 * tol)).powf(1.0 / (p + 1.0)) + 0.5;
    if m_real > 5e7 {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            requirement: "would need more than 5e7 terms; loosen the tolerance",
        });
    }
    let m = (m_real.ceil() as usize).max(10);

    let mut acc = CompensatedSum::new();
    for j in 1..=m {
        acc.add((j as f64).powf(-p));
    }
    // Tail Σ_{j>M} j^{−p} as the midpoint-rule integral ∫_{M+1/2}^∞ t^{−p} dt;
    // the per-term defect is second order, giving the /12 error bound above.
    let tail = (m as f64 + 0.5).powf(1.0 - p) / (p - 1.0);
    let value = acc.total() + tail;
    let error_bound = p * (m as f64 - 0.5).powf(-(p + 1.0)) / 12.0;

    assert!(
        value >= 1.0 / (p - 1.0),
        "zeta estimate fell below its analytic lower bound"
    );
    Ok(ZetaEstimate { value, error_bound })
}

/// Truncated weights `a_k = k^{−p−1}/ζ(p)` with certified tails.
///
/// Analytically `Σ a_k·k = 1` and `Σ a_k |z^k − w^k|² ≤ C(p−1)|z−w|ᵖ`; the
/// scheme stores how much of both sums the truncation can miss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightScheme {
    pub p: f64,
    /// Truncation index K.
    pub k_max: usize,
    /// `a_1 ..= a_K`.
    pub weights: Vec<f64>,
    pub zeta: ZetaEstimate,
    /// Certified bound on `Σ_{k>K} a_k·4`, the largest possible contribution
    /// of the dropped terms to the weighted chord kernel.
    pub tail_bound: f64,
    /// Certified bound on `Σ_{k>K} a_k·k = 1 − Σ_{k≤K} a_k·k`.
    pub tail_first_moment: f64,
}

impl WeightScheme {
    /// `Σ_{k≤K} a_k·k`, which sits in `[1 − tail_first_moment, 1]`.
    pub fn truncated_first_moment(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for (i, &a) in self.weights.iter().enumerate() {
            acc.add(a * (i + 1) as f64);
        }
        acc.total()
    }
}

/// Builds the weight scheme for the small-exponent branch `1 < p ≤ 3/2`.
///
/// K is the smallest index with `4(p−1)K^{−p} ≤ tail_tol`, matching the
/// analytic tail estimate `Σ_{k>K} k^{−p−1} ≤ K^{−p}/p` combined with
/// `1/ζ(p) ≤ p−1`.
pub fn build_weights(p: f64, tail_tol: f64) -> Result<WeightScheme> {
    if !(p.is_finite() && p > 1.0 && p <= 1.5) {
        return Err(Error::InvalidExponent {
            p,
            range: "1 < p <= 3/2",
        });
    }
    if !(tail_tol.is_finite() && tail_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tail_tol",
            value: tail_tol,
            requirement: "must be positive",
        });
    }
    let k_real = (4.0 * (p - 1.0) / tail_tol).powf(1.0 / p);
    if k_real > 2e7 {
        return Err(Error::InvalidParameter {
            name: "tail_tol",
            value: tail_tol,
            requirement: "would need more than 2e7 weights; loosen the tolerance",
        });
    }
    let k_max = (k_real.ceil() as usize).max(1);

    let zeta = zeta_partial(p, 1e-12)?;
    let zeta_lower = zeta.value - zeta.error_bound;
    let weights: Vec<f64> = (1..=k_max)
        .map(|k| (k as f64).powf(-p - 1.0) / zeta.value)
        .collect();
    let kf = k_max as f64;
    let tail_bound = 4.0 * kf.powf(-p) / (p * zeta_lower);
    let tail_first_moment = kf.powf(1.0 - p) / ((p - 1.0) * zeta_lower);

    debug_assert!(tail_bound <= 4.0 * (p - 1.0) * kf.powf(-p) * (1.0 + 1e-9));
    Ok(WeightScheme {
        p,
        k_max,
        weights,
        zeta,
        tail_bound,
        tail_first_moment,
    })
}

/// Truncated weighted chord kernel with its certified upper envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBound {
    /// `Σ_{k≤K} a_k |z^k − w^k|²`.
    pub value: f64,
    /// `value + tail_bound`, an upper bound for the full series.
    pub upper: f64,
}

/// Evaluates `Σ_k a_k |z^k − w^k|²` for two circle points.
///
/// Chord distances of powers come from the angle difference,
/// `|z^k − w^k| = 2|sin(kΔ/2)|`, never from repeated complex multiplication.
pub fn weighted_kernel(ws: &WeightScheme, z: UnitPoint, w: UnitPoint) -> KernelBound {
    let half_delta = 0.5 * (z.angle() - w.angle());
    let mut acc = CompensatedSum::new();
    for (i, &a) in ws.weights.iter().enumerate() {
        let s = ((i + 1) as f64 * half_delta).sin();
        acc.add(a * 4.0 * s * s);
    }
    let value = acc.total();
    KernelBound {
        value,
        upper: value + ws.tail_bound,
    }
}

/// The package `(δ, α, n)` realizing the threshold-to-√3 conversion:
/// `α = 2 arcsin(δ/2)`, `n = ⌊α₀/α⌋` with `α₀ = 2π/3`, so that
/// `|a^n − b^n| ≥ √3 ⟹ |a − b| ≥ δ` and `1/n ≤ 2α/α₀ ≤ (2/√3)·δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPlan {
    pub delta: f64,
    /// Angular threshold matching chord δ.
    pub alpha: f64,
    /// Angular threshold matching chord √3: `2π/3`.
    pub alpha0: f64,
    pub n: u64,
    /// `2α/α₀`, the upper bound on `1/n`.
    pub inv_n_bound: f64,
}

/// Builds the threshold plan for `0 < δ ≤ √3`.
pub fn threshold_plan(delta: f64) -> Result<ThresholdPlan> {
    let sqrt3 = 3.0_f64.sqrt();
    if !(delta.is_finite() && delta > 0.0 && delta <= sqrt3) {
        return Err(Error::InvalidThreshold {
            delta,
            range: "0 < delta <= sqrt(3)",
        });
    }
    let alpha = 2.0 * (0.5 * delta).asin();
    let alpha0 = 2.0 * PI / 3.0;
    // α ≤ α₀ analytically; the max(1) guards the one-ulp case at δ = √3.
    let n = ((alpha0 / alpha).floor() as u64).max(1);
    Ok(ThresholdPlan {
        delta,
        alpha,
        alpha0,
        n,
        inv_n_bound: 2.0 * alpha / alpha0,
    })
}

/// A grid point at which the separation implication would fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationViolation {
    pub theta: f64,
    pub chord_of_power: f64,
}

/// Checks the contrapositive of the separation implication on an angle grid:
/// for every θ ∈ [0, α) it must hold that `2 sin(nθ/2) < √3`, because
/// `nθ < nα ≤ α₀ < π` keeps the powered angle from wrapping.
///
/// Returns the (expected empty) list of violations.
pub fn check_separation_implication(
    plan: &ThresholdPlan,
    grid_size: usize,
) -> Vec<SeparationViolation> {
    assert!(grid_size >= 1000, "angle grid too coarse to be meaningful");
    let sqrt3 = 3.0_f64.sqrt();
    let mut violations = Vec::new();
    for j in 0..grid_size {
        let theta = plan.alpha * j as f64 / grid_size as f64;
        let chord = 2.0 * (0.5 * plan.n as f64 * theta).sin();
        if chord >= sqrt3 {
            violations.push(SeparationViolation {
                theta,
                chord_of_power: chord,
            });
        }
    }
    violations
}
