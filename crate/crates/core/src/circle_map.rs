//! Circle-valued maps stored as sampled continuous phase lifts.
//!
//! A map `f: S¹ → S¹` is kept as `N` lift samples `θ_i = θ(2πi/N)` together
//! with the closing increment `θ(2π) − θ(0)`. Storing the lift instead of
//! complex samples makes the winding number exact (an integer read off the
//! closing increment) and makes powering exact (multiply the phases by `k`).
//!
//! Sampling is considered fine enough when every lift step stays inside the
//! safety band `|Δθ| < π·(1−margin)`; unwrapping is ambiguous at π, and the
//! margin keeps a quantifiable distance from that ambiguity. Inputs that
//! violate the band are rejected with [`Error::JumpTooLarge`], never silently
//! resampled.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;

/// Default width of the unwrapping safety band.
pub const DEFAULT_MARGIN: f64 = 0.1;

/// Tolerance for `winding_increment / 2π` to count as an integer.
pub const WINDING_TOL: f64 = 1e-9;

const MIN_GRID: usize = 8;

/// Wrap an angle to `[-π, π]`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

/// A point of the unit circle, stored as an angle so the modulus is exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitPoint {
    angle: f64,
}

impl UnitPoint {
    pub fn new(angle: f64) -> Self {
        debug_assert!(angle.is_finite());
        Self { angle }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// Euclidean (chordal) distance to another point: `2|sin(Δ/2)|`.
    pub fn chord_to(&self, other: UnitPoint) -> f64 {
        2.0 * (0.5 * (self.angle - other.angle)).sin().abs()
    }
}

/// A continuous map `S¹ → S¹` as a sampled continuous phase lift.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    phases: Vec<f64>,
    /// Lift steps `θ_{i+1} − θ_i`; the last entry closes the loop through
    /// `θ_0 + winding_increment − θ_{N−1}`.
    steps: Vec<f64>,
    winding_increment: f64,
    margin: f64,
    max_abs_step: f64,
}

impl CircleMap {
    /// Builds a map from raw lift samples, validating every invariant.
    pub fn from_phase_samples(
        samples: Vec<f64>,
        winding_increment: f64,
        margin: f64,
    ) -> Result<Self> {
        Self::build(samples, winding_increment, margin)
    }

    /// The constant map `x ↦ e^{i·angle}`.
    pub fn constant(angle: f64, grid_size: usize) -> Result<Self> {
        Self::build(vec![angle; grid_size], 0.0, DEFAULT_MARGIN)
    }

    /// The power map `z ↦ z^d`, sampled as `θ_i = d·2πi/N`.
    pub fn power(d: i64, grid_size: usize) -> Result<Self> {
        let needed = MIN_GRID * d.unsigned_abs().max(1) as usize;
        if grid_size < needed {
            return Err(Error::JumpTooLarge {
                index: 0,
                step: d.abs() as f64 * TAU / grid_size.max(1) as f64,
                limit: jump_limit(DEFAULT_MARGIN),
            });
        }
        let n = grid_size as f64;
        let phases = (0..grid_size)
            .map(|i| TAU * (d * i as i64) as f64 / n)
            .collect();
        Self::build(phases, TAU * d as f64, DEFAULT_MARGIN)
    }

    /// The degree-`d` test family `θ(x) = d·x + eps·sin(m·x)`; the 2π-periodic
    /// perturbation leaves the winding number at `d`.
    pub fn perturbed(d: i64, eps: f64, m: i64, grid_size: usize) -> Result<Self> {
        if !eps.is_finite() {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                requirement: "must be finite",
            });
        }
        let slope_bound = d.abs() as f64 + (eps * m as f64).abs();
        reject_undersampled(slope_bound, grid_size, DEFAULT_MARGIN)?;
        let n = grid_size as f64;
        let phases = (0..grid_size)
            .map(|i| {
                let x = TAU * i as f64 / n;
                d as f64 * x + eps * (m as f64 * x).sin()
            })
            .collect();
        Self::build(phases, TAU * d as f64, DEFAULT_MARGIN)
    }

    /// The boundary restriction of the disk automorphism
    /// `z ↦ (z − a)/(1 − ā·z)` with `a = a_modulus·e^{i·a_angle}`.
    ///
    /// Degree 1 for every `|a| < 1`; the phase derivative is the Poisson
    /// kernel, so oscillation concentrates as `|a| → 1` and the required grid
    /// size grows like `(1+|a|)/(1−|a|)`.
    pub fn blaschke(a_modulus: f64, a_angle: f64, grid_size: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&a_modulus) {
            return Err(Error::InvalidParameter {
                name: "a_modulus",
                value: a_modulus,
                requirement: "must lie in [0, 1)",
            });
        }
        if !a_angle.is_finite() {
            return Err(Error::InvalidParameter {
                name: "a_angle",
                value: a_angle,
                requirement: "must be finite",
            });
        }
        let slope_bound = (1.0 + a_modulus) / (1.0 - a_modulus);
        reject_undersampled(slope_bound, grid_size, DEFAULT_MARGIN)?;

        let a = Complex64::from_polar(a_modulus, a_angle);
        let n = grid_size as f64;
        // Principal argument per grid point, then continuous branch tracking
        // along the grid. Valid exactly when the jump invariant holds, which
        // build() checks.
        let args: Vec<f64> = (0..grid_size)
            .map(|i| {
                let z = Complex64::from_polar(1.0, TAU * i as f64 / n);
                ((z - a) / (Complex64::new(1.0, 0.0) - a.conj() * z)).arg()
            })
            .collect();
        let mut phases = Vec::with_capacity(grid_size);
        phases.push(args[0]);
        for i in 1..grid_size {
            let prev = *phases.last().unwrap();
            phases.push(prev + wrap_angle(args[i] - args[i - 1]));
        }
        let total = phases[grid_size - 1] - phases[0] + wrap_angle(args[0] - args[grid_size - 1]);
        // Snap the closing increment to the nearest multiple of 2π; the
        // accumulated wrap noise is orders of magnitude below WINDING_TOL.
        let winding_increment = TAU * (total / TAU).round();
        Self::build(phases, winding_increment, DEFAULT_MARGIN)
    }

    /// The pointwise power `fᵏ`, with phases `k·θ_i`.
    ///
    /// Requires `k · max|Δθ| < π·(1−margin)`: powering multiplies every lift
    /// step by `k`, so the base map must be sampled finely enough first.
    pub fn pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter {
                name: "k",
                value: 0.0,
                requirement: "power exponent must be a positive integer",
            });
        }
        let kf = k as f64;
        let limit = jump_limit(self.margin);
        if kf * self.max_abs_step >= limit {
            return Err(Error::JumpTooLarge {
                index: 0,
                step: kf * self.max_abs_step,
                limit,
            });
        }
        let phases = self.phases.iter().map(|&t| kf * t).collect();
        Self::build(phases, kf * self.winding_increment, self.margin)
    }

    /// Rotates the image: adds `phi` to every phase. Degree is unchanged and
    /// all pairwise chordal distances are preserved.
    pub fn rotate(&self, phi: f64) -> Self {
        debug_assert!(phi.is_finite());
        let phases: Vec<f64> = self.phases.iter().map(|&t| t + phi).collect();
        // Steps are unchanged in exact arithmetic; skip the jump re-check so
        // rotation cannot fail on a map that was already valid.
        Self::assemble(phases, self.winding_increment, self.margin)
    }

    /// Complex conjugation: negates every phase and the degree.
    pub fn conjugate(&self) -> Self {
        let phases: Vec<f64> = self.phases.iter().map(|&t| -t).collect();
        Self::assemble(phases, -self.winding_increment, self.margin)
    }

    fn build(phases: Vec<f64>, winding_increment: f64, margin: f64) -> Result<Self> {
        if phases.len() < MIN_GRID {
            return Err(Error::InvalidParameter {
                name: "grid_size",
                value: phases.len() as f64,
                requirement: "need at least 8 samples",
            });
        }
        if !(margin > 0.0 && margin <= 0.5) {
            return Err(Error::InvalidParameter {
                name: "margin",
                value: margin,
                requirement: "must lie in (0, 0.5]",
            });
        }
        if let Some(&bad) = phases.iter().find(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "phase",
                value: bad,
                requirement: "all phases must be finite",
            });
        }
        if !winding_increment.is_finite() {
            return Err(Error::InvalidParameter {
                name: "winding_increment",
                value: winding_increment,
                requirement: "must be finite",
            });
        }
        let turns = winding_increment / TAU;
        let residual = (turns - turns.round()).abs();
        if residual >= WINDING_TOL {
            return Err(Error::NonIntegerWinding {
                increment: winding_increment,
                residual,
            });
        }

        let map = Self::assemble(phases, winding_increment, margin);
        let limit = jump_limit(margin);
        if map.max_abs_step >= limit {
            let index = map.steps.iter().position(|s| s.abs() >= limit).unwrap_or(0);
            return Err(Error::JumpTooLarge {
                index,
                step: map.steps[index],
                limit,
            });
        }
        Ok(map)
    }

    /// Computes steps and the step bound without re-validating.
    fn assemble(phases: Vec<f64>, winding_increment: f64, margin: f64) -> Self {
        let n = phases.len();
        let mut steps = Vec::with_capacity(n);
        for i in 0..n - 1 {
            steps.push(phases[i + 1] - phases[i]);
        }
        steps.push(phases[0] + winding_increment - phases[n - 1]);
        let max_abs_step = steps.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        Self {
            phases,
            steps,
            winding_increment,
            margin,
            max_abs_step,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Lift steps, the closing step last.
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn winding_increment(&self) -> f64 {
        self.winding_increment
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn max_abs_step(&self) -> f64 {
        self.max_abs_step
    }

    /// Grid spacing `2π/N`.
    pub fn spacing(&self) -> f64 {
        TAU / self.phases.len() as f64
    }

    /// Sampled Lipschitz bound of the lift, `max|Δθ|/h`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.max_abs_step / self.spacing()
    }

    pub fn is_constant(&self) -> bool {
        self.max_abs_step == 0.0
    }

    /// Value of the lift at an arbitrary parameter, by linear interpolation
    /// between samples and the extension `θ(t + 2π) = θ(t) + winding_increment`.
    pub fn lift_at(&self, t: f64) -> f64 {
        let loops = (t / TAU).floor();
        let r = t - loops * TAU;
        let n = self.phases.len();
        let pos = r / self.spacing();
        let j = (pos as usize).min(n - 1);
        self.phases[j] + (pos - j as f64) * self.steps[j] + loops * self.winding_increment
    }

    /// The map value `f(e^{it})` as a point of the circle.
    pub fn value_at(&self, t: f64) -> UnitPoint {
        UnitPoint::new(self.lift_at(t))
    }

    /// Decomposes a shift `u ∈ (0, 2π)` into whole grid cells plus a
    /// fractional cell, for fast evaluation of `θ(s_i + u) − θ(s_i)`.
    #[inline]
    pub(crate) fn shift_params(&self, u: f64) -> (usize, f64) {
        let pos = u / self.spacing();
        let j0 = (pos as usize).min(self.phases.len() - 1);
        (j0, pos - j0 as f64)
    }

    /// `θ(s_i + u) − θ(s_i)` where `(j0, frac)` came from [`Self::shift_params`].
    #[inline]
    pub(crate) fn lift_diff(&self, i: usize, j0: usize, frac: f64) -> f64 {
        let n = self.phases.len();
        let mut idx = i + j0;
        let mut extra = 0.0;
        if idx >= n {
            idx -= n;
            extra = self.winding_increment;
        }
        self.phases[idx] + extra + frac * self.steps[idx] - self.phases[i]
    }
}

#[inline]
fn jump_limit(margin: f64) -> f64 {
    std::f64::consts::PI * (1.0 - margin)
}

fn reject_undersampled(slope_bound: f64, grid_size: usize, margin: f64) -> Result<()> {
    let step_bound = slope_bound * TAU / grid_size.max(1) as f64;
    let limit = jump_limit(margin);
    if step_bound >= limit {
        return Err(Error::JumpTooLarge {
            index: 0,
            step: step_bound,
            limit,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity(n: usize) -> CircleMap {
        CircleMap::power(1, n).unwrap()
    }

    #[test]
    fn constant_map_from_samples() {
        let f = CircleMap::from_phase_samples(vec![0.0; 64], 0.0, DEFAULT_MARGIN).unwrap();
        assert_eq!(f.winding_increment(), 0.0);
        assert!(f.is_constant());
    }

    #[test]
    fn identity_from_samples() {
        let n = 64;
        let samples: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let f = CircleMap::from_phase_samples(samples, TAU, DEFAULT_MARGIN).unwrap();
        assert_eq!(f.winding_increment(), TAU);
        assert!((f.max_abs_step() - TAU / n as f64).abs() < 1e-15);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let n = 64;
        let mut samples: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        // Force one step of exactly π.
        samples[10] = samples[9] + std::f64::consts::PI;
        let err = CircleMap::from_phase_samples(samples, TAU, DEFAULT_MARGIN).unwrap_err();
        assert!(matches!(err, Error::JumpTooLarge { .. }));
    }

    #[test]
    fn non_integer_winding_is_rejected() {
        let err = CircleMap::from_phase_samples(vec![0.0; 16], 1.0, DEFAULT_MARGIN).unwrap_err();
        assert!(matches!(err, Error::NonIntegerWinding { .. }));
    }

    #[test]
    fn too_few_samples_is_rejected() {
        let err = CircleMap::from_phase_samples(vec![0.0; 7], 0.0, DEFAULT_MARGIN).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidParameter {
                name: "grid_size",
                ..
            }
        ));
    }

    #[test]
    fn margin_domain_is_enforced() {
        for bad in [0.0, -0.1, 0.6] {
            let err = CircleMap::from_phase_samples(vec![0.0; 16], 0.0, bad).unwrap_err();
            assert!(matches!(
                err,
                Error::InvalidParameter { name: "margin", .. }
            ));
        }
    }

    #[test]
    fn power_family_windings() {
        assert_eq!(
            CircleMap::power(3, 1024).unwrap().winding_increment(),
            3.0 * TAU
        );
        assert_eq!(CircleMap::power(0, 64).unwrap().winding_increment(), 0.0);
        assert_eq!(
            CircleMap::power(-2, 256).unwrap().winding_increment(),
            -2.0 * TAU
        );
    }

    #[test]
    fn power_family_undersampling() {
        assert!(matches!(
            CircleMap::power(3, 16).unwrap_err(),
            Error::JumpTooLarge { .. }
        ));
    }

    #[test]
    fn perturbed_family() {
        let f = CircleMap::perturbed(2, 0.5, 3, 2048).unwrap();
        assert_eq!(f.winding_increment(), 2.0 * TAU);

        // eps = 0 degenerates to the power map.
        let g = CircleMap::perturbed(1, 0.0, 1, 64).unwrap();
        let id = identity(64);
        for (a, b) in g.phases().iter().zip(id.phases()) {
            assert!((a - b).abs() < 1e-12);
        }

        assert!(matches!(
            CircleMap::perturbed(1, 5.0, 40, 64).unwrap_err(),
            Error::JumpTooLarge { .. }
        ));
    }

    #[test]
    fn blaschke_at_origin_is_identity() {
        let f = CircleMap::blaschke(0.0, 0.0, 64).unwrap();
        let id = identity(64);
        assert_eq!(f.winding_increment(), TAU);
        for (a, b) in f.phases().iter().zip(id.phases()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn blaschke_concentrated_still_degree_one() {
        let f = CircleMap::blaschke(0.9, 0.0, 8192).unwrap();
        assert_eq!(f.winding_increment(), TAU);
    }

    #[test]
    fn blaschke_preconditions() {
        assert!(matches!(
            CircleMap::blaschke(1.0, 0.0, 8192).unwrap_err(),
            Error::InvalidParameter {
                name: "a_modulus",
                ..
            }
        ));
        assert!(matches!(
            CircleMap::blaschke(0.99, 0.0, 64).unwrap_err(),
            Error::JumpTooLarge { .. }
        ));
    }

    #[test]
    fn pow_of_identity_matches_power_family() {
        let f = identity(1024).pow(5).unwrap();
        let g = CircleMap::power(5, 1024).unwrap();
        for (a, b) in f.phases().iter().zip(g.phases()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(f.winding_increment(), g.winding_increment());
    }

    #[test]
    fn pow_of_constant_is_constant() {
        let f = CircleMap::constant(0.7, 64).unwrap().pow(17).unwrap();
        assert!(f.is_constant());
    }

    #[test]
    fn pow_rejects_coarse_base() {
        // 20 · (4π/64) ≥ π(1 − margin).
        let f = CircleMap::power(2, 64).unwrap();
        assert!(matches!(f.pow(20).unwrap_err(), Error::JumpTooLarge { .. }));
    }

    #[test]
    fn pow_one_is_identity_operation() {
        let f = CircleMap::blaschke(0.5, 1.0, 512).unwrap();
        let g = f.pow(1).unwrap();
        assert_eq!(f.phases(), g.phases());
    }

    #[test]
    fn rotation_preserves_chordal_distances() {
        let f = CircleMap::perturbed(1, 0.4, 2, 256).unwrap();
        let g = f.rotate(std::f64::consts::FRAC_PI_2);
        assert_eq!(g.winding_increment(), f.winding_increment());
        let n = f.grid_size();
        for i in (0..n).step_by(17) {
            for j in (0..n).step_by(29) {
                let df = UnitPoint::new(f.phases()[i]).chord_to(UnitPoint::new(f.phases()[j]));
                let dg = UnitPoint::new(g.phases()[i]).chord_to(UnitPoint::new(g.phases()[j]));
                assert!((df - dg).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conjugate_negates_winding() {
        let f = CircleMap::power(3, 1024).unwrap().conjugate();
        assert_eq!(f.winding_increment(), -3.0 * TAU);
        let c = CircleMap::constant(0.3, 64).unwrap().conjugate();
        assert!(c.is_constant());
    }

    #[test]
    fn lift_interpolation_is_exact_for_linear_lifts() {
        let f = CircleMap::power(3, 128).unwrap();
        for t in [0.0, 0.1, 1.7, 4.0, 6.2, 7.5, 13.0, -0.3] {
            assert!((f.lift_at(t) - 3.0 * t).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn unit_point_chord_matches_complex_distance() {
        let mut x = -7.0;
        while x < 7.0 {
            let a = UnitPoint::new(x);
            let b = UnitPoint::new(0.4 * x + 1.0);
            let exact = (a.to_complex() - b.to_complex()).norm();
            assert!((a.chord_to(b) - exact).abs() < 1e-12);
            x += 0.37;
        }
    }
}
