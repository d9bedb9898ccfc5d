//! Property tests for the structural invariants of maps, degrees, weights
//! and threshold plans, plus the independent degree oracle.

mod common;

use proptest::prelude::*;

use deglab::circle_map::{CircleMap, UnitPoint, TAU};
use deglab::degree::{check_power_identity, degree};
use deglab::powers::{build_weights, threshold_plan, weighted_kernel, zeta_partial};

use common::degree_by_argument_increment;

const SQRT3: f64 = 1.7320508075688772;

fn family(choice: u8, d: i64, eps: f64, a: f64) -> CircleMap {
    match choice % 4 {
        0 => CircleMap::constant(eps, 256).unwrap(),
        1 => CircleMap::power(d, 2048).unwrap(),
        2 => CircleMap::perturbed(d, eps, 3, 2048).unwrap(),
        _ => CircleMap::blaschke(a, eps, 2048).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn winding_increment_is_integer_turns(choice in 0u8..4, d in -5i64..=5, eps in -0.8f64..0.8, a in 0.0f64..0.9) {
        let f = family(choice, d, eps, a);
        let turns = f.winding_increment() / TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn lift_degree_matches_argument_oracle(choice in 0u8..4, d in -5i64..=5, eps in -0.8f64..0.8, a in 0.0f64..0.9) {
        let f = family(choice, d, eps, a);
        prop_assert_eq!(degree(&f).unwrap().degree, degree_by_argument_increment(&f));
    }

    #[test]
    fn power_identity_holds_for_admissible_powers(choice in 0u8..4, d in -3i64..=3, eps in -0.5f64..0.5, a in 0.0f64..0.8, k in 1u32..=6) {
        let f = family(choice, d, eps, a);
        prop_assert!(check_power_identity(&f, k).unwrap());
    }

    #[test]
    fn powers_compose(j in 1u32..=3, k in 1u32..=3, d in -2i64..=2, eps in -0.4f64..0.4) {
        let f = CircleMap::perturbed(d, eps, 2, 1024).unwrap();
        let lhs = f.pow(j).unwrap().pow(k).unwrap();
        let rhs = f.pow(j * k).unwrap();
        for (a, b) in lhs.phases().iter().zip(rhs.phases()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_preserves_pairwise_chords(phi in -10.0f64..10.0, d in 1i64..=3, eps in -0.5f64..0.5) {
        let f = CircleMap::perturbed(d, eps, 4, 512).unwrap();
        let g = f.rotate(phi);
        for i in (0..512).step_by(41) {
            for j in (0..512).step_by(67) {
                let cf = UnitPoint::new(f.phases()[i]).chord_to(UnitPoint::new(f.phases()[j]));
                let cg = UnitPoint::new(g.phases()[i]).chord_to(UnitPoint::new(g.phases()[j]));
                prop_assert!((cf - cg).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetries_act_on_degree(choice in 0u8..4, d in -4i64..=4, eps in -0.6f64..0.6, a in 0.0f64..0.85, phi in -7.0f64..7.0) {
        let f = family(choice, d, eps, a);
        let base = degree(&f).unwrap().degree;
        prop_assert_eq!(degree(&f.rotate(phi)).unwrap().degree, base);
        prop_assert_eq!(degree(&f.conjugate()).unwrap().degree, -base);
    }

    #[test]
    fn chord_bound_holds_pointwise(x in -10.0f64..10.0, y in -10.0f64..10.0, p in 1.0001f64..=2.0) {
        // |z−w|² ≤ 2^{2−p}|z−w|ᵖ on the unit circle.
        let c = UnitPoint::new(x).chord_to(UnitPoint::new(y));
        prop_assert!(c * c <= 2.0f64.powf(2.0 - p) * c.powf(p) * (1.0 + 1e-12));
    }

    #[test]
    fn threshold_plan_invariants(delta in 1e-4f64..=SQRT3) {
        let plan = threshold_plan(delta).unwrap();
        prop_assert!(plan.n >= 1);
        prop_assert!(plan.n as f64 * plan.alpha <= plan.alpha0 * (1.0 + 1e-12));
        prop_assert!(1.0 / plan.n as f64 <= plan.inv_n_bound + 1e-12);
        prop_assert!(plan.inv_n_bound <= (2.0 / SQRT3) * delta * (1.0 + 1e-12));
    }

    #[test]
    fn zeta_estimates_agree_within_their_bounds(p in 1.05f64..3.0) {
        let coarse = zeta_partial(p, 1e-5).unwrap();
        let fine = zeta_partial(p, 1e-11).unwrap();
        prop_assert!((coarse.value - fine.value).abs() <= coarse.error_bound + fine.error_bound);
        prop_assert!(coarse.value >= 1.0 / (p - 1.0));
    }

    #[test]
    fn weighted_kernel_envelope(p in 1.01f64..=1.5, x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let ws = build_weights(p, 1e-4).unwrap();
        let k = weighted_kernel(&ws, UnitPoint::new(x), UnitPoint::new(y));
        let swapped = weighted_kernel(&ws, UnitPoint::new(y), UnitPoint::new(x));
        prop_assert!(k.value >= 0.0);
        prop_assert!(k.upper >= k.value);
        prop_assert!((k.upper - k.value - ws.tail_bound).abs() <= f64::EPSILON * k.upper.max(1.0));
        prop_assert_eq!(k.value, swapped.value);
    }
}

#[test]
fn blaschke_degree_against_argument_oracle() {
    let f = CircleMap::blaschke(0.9, 0.0, 8192).unwrap();
    assert_eq!(degree(&f).unwrap().degree, 1);
    assert_eq!(degree_by_argument_increment(&f), 1);
}

#[test]
fn perturbed_cube_against_argument_oracle() {
    let f = CircleMap::perturbed(1, 0.3, 5, 4096).unwrap();
    let cubed = f.pow(3).unwrap();
    assert_eq!(degree(&cubed).unwrap().degree, 3);
    assert_eq!(degree_by_argument_increment(&cubed), 3);
}
