//! Numerical laboratory for degree inequalities of circle-valued maps.
//!
//! The crate works with continuous maps `f: S¹ → S¹` stored as sampled
//! continuous phase lifts. On top of that representation it provides
//!
//! * exact winding numbers and the power identity `deg(fᵏ) = k·deg f`
//!   ([`degree`](mod@degree), [`circle_map`]),
//! * the fractional energy `E_p(f) = ∬ |f(x)−f(y)|ᵖ/|x−y|² dx dy` and the
//!   threshold functional `I_δ(f) = ∬ 1{|f(x)−f(y)|≥δ}/|x−y|² dx dy`,
//!   evaluated by graded singular-kernel quadrature with closed-form
//!   oracles for the identity map ([`energy`]),
//! * the constructive machinery behind the degree bounds: normalized
//!   weights `a_k = k^{−p−1}/ζ(p)` with certified truncation tails and the
//!   threshold plan `(α, n)` that converts a chord threshold δ into the
//!   fixed threshold √3 ([`powers`]),
//! * end-to-end checks of the inequalities and sweep drivers that estimate
//!   the admissible universal constants in the degenerate regimes `p → 1⁺`
//!   and `δ → 0⁺` ([`verify`]).
//!
//! Map families (constant, power, perturbed, Blaschke) are registered by
//! name in [`family::FamilyRegistry`] and selected at runtime from family
//! specs such as `power:d=3`; the scan regimes (`hhalf`, `op51`, `op53`,
//! `lemmas`) are likewise strategies dispatched by name ([`verify::regime_for`]).

pub mod circle_map;
pub mod degree;
pub mod energy;
pub mod error;
pub mod family;
pub mod powers;
pub mod special;
pub mod sum;
pub mod verify;

pub use circle_map::{CircleMap, UnitPoint};
pub use degree::{check_power_identity, degree, DegreeResult};
pub use energy::{energy_p, energy_p_oracle, threshold_energy, EnergyResult, Scheme};
pub use error::{Error, Result};
pub use family::{FamilyRegistry, FamilySpec, MapFamily};
pub use powers::{build_weights, threshold_plan, zeta_partial, ThresholdPlan, WeightScheme};
pub use verify::{scan, RatioRecord, RegimeKind, ScanConfig, ScanReport};
