//! Command-line front end: config parsing, scan orchestration, and
//! machine-readable report emission.

pub mod commands;
pub mod config;
pub mod output;

/// Process exit codes.
pub mod exit_code {
    pub const OK: i32 = 0;
    /// A lemma/oracle check failed, or a scan row recorded an error.
    pub const CHECK_FAILED: i32 = 1;
    /// Config could not be parsed or validated, or input was unreadable.
    pub const CONFIG: i32 = 2;
    /// A quadrature hit its refinement cap without converging.
    pub const NUMERIC: i32 = 3;
}
