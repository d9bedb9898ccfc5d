use thiserror::Error;

/// Errors produced by map construction and the numerical operators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A lift step reached the unwrapping safety band π·(1−margin).
    /// The map must be resampled on a finer grid before the operation.
    #[error(
        "lift step |{step:.6}| at index {index} reaches the jump limit {limit:.6}; resample finer"
    )]
    JumpTooLarge { index: usize, step: f64, limit: f64 },

    /// The closing increment of the lift is not an integer multiple of 2π.
    #[error(
        "winding increment {increment:.12} is {residual:.3e} away from the nearest multiple of 2π"
    )]
    NonIntegerWinding { increment: f64, residual: f64 },

    #[error("exponent p = {p} outside the admissible range {range}")]
    InvalidExponent { p: f64, range: &'static str },

    #[error("threshold delta = {delta} outside the admissible range {range}")]
    InvalidThreshold { delta: f64, range: &'static str },

    #[error("invalid parameter {name} = {value}: {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// Refinement cap reached before the relative-change criterion was met.
    #[error("no convergence after {levels} refinements: last change {last_change:.3e} > target {target:.3e}")]
    NoConvergence {
        levels: u32,
        last_change: f64,
        target: f64,
    },

    #[error("unknown map family '{0}'")]
    UnknownFamily(String),

    #[error("family '{family}' does not accept parameter '{name}'")]
    UnknownFamilyParam { family: String, name: String },

    #[error("family '{family}' is missing required parameter '{name}'")]
    MissingFamilyParam { family: String, name: &'static str },

    #[error("malformed family spec '{spec}': {reason}")]
    MalformedFamilySpec { spec: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
