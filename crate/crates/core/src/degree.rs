//! Topological degree (winding number) of a sampled circle map.

use serde::{Deserialize, Serialize};

use crate::circle_map::{CircleMap, TAU, WINDING_TOL};
use crate::error::{Error, Result};

/// Degree read off the closing increment of the lift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeResult {
    pub degree: i64,
    /// Distance of `winding_increment / 2π` from the nearest integer.
    pub residual: f64,
}

/// Winding number of the map: `round(winding_increment / 2π)`.
///
/// Construction already guarantees an integer closing increment; the
/// residual is re-checked here so the two code paths stay independent.
pub fn degree(f: &CircleMap) -> Result<DegreeResult> {
    let turns = f.winding_increment() / TAU;
    let rounded = turns.round();
    let residual = (turns - rounded).abs();
    if residual >= WINDING_TOL {
        return Err(Error::NonIntegerWinding {
            increment: f.winding_increment(),
            residual,
        });
    }
    Ok(DegreeResult {
        degree: rounded as i64,
        residual,
    })
}

/// Verifies the power identity `deg(fᵏ) = k·deg f` by integer comparison.
pub fn check_power_identity(f: &CircleMap, k: u32) -> Result<bool> {
    let base = degree(f)?.degree;
    let powered = degree(&f.pow(k)?)?.degree;
    Ok(powered == k as i64 * base)
}
