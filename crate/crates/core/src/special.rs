//! Special functions needed by the closed-form oracles.

use std::f64::consts::PI;

// Lanczos coefficients for g = 7, n = 9 (the GNU Scientific Library set),
// kept at their published precision.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Gamma function for positive real arguments.
///
/// Lanczos rational approximation with the reflection formula below 1/2;
/// relative accuracy is better than 1e-10 on the range used by the energy
/// oracles (arguments in (0, 3]).
pub fn gamma(x: f64) -> f64 {
    assert!(x.is_finite() && x > 0.0, "gamma: argument must be positive");
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut t = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            t += c / (x + i as f64);
        }
        let w = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * w.powf(x + 0.5) * (-w).exp() * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert!(rel_err(gamma(1.0), 1.0) < 1e-12);
        assert!(rel_err(gamma(2.0), 1.0) < 1e-12);
        assert!(rel_err(gamma(3.0), 2.0) < 1e-12);
        assert!(rel_err(gamma(0.5), PI.sqrt()) < 1e-12);
        assert!(rel_err(gamma(1.5), 0.5 * PI.sqrt()) < 1e-12);
        assert!(rel_err(gamma(2.5), 0.75 * PI.sqrt()) < 1e-12);
    }

    #[test]
    fn reflection_identity_on_quarter_points() {
        // Γ(x)Γ(1−x) = π/sin(πx); at x = 1/4 the product is π√2.
        let product = gamma(0.25) * gamma(0.75);
        assert!(rel_err(product, PI * 2.0_f64.sqrt()) < 1e-11);
    }

    #[test]
    fn recurrence_across_oracle_range() {
        // Γ(x+1) = x·Γ(x) catches coefficient errors anywhere in the range.
        let mut x = 0.0005;
        while x < 2.0 {
            assert!(
                rel_err(gamma(x + 1.0), x * gamma(x)) < 1e-11,
                "recurrence failed at x = {x}"
            );
            x += 0.0373;
        }
    }

    #[test]
    fn small_argument_pole_behaviour() {
        // Γ(x) ~ 1/x − γ as x → 0⁺.
        let x = 5e-4;
        let euler_gamma = 0.5772156649015329;
        let expected =
            1.0 / x - euler_gamma + x * (euler_gamma * euler_gamma / 2.0 + PI * PI / 12.0);
        assert!(rel_err(gamma(x), expected) < 1e-9);
    }
}
