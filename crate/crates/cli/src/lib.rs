//! Command-line harness for `icpkit`: JSON instance files, verification
//! campaigns over all residual formulations, and wrappers around the solver,
//! oracle and generator.

// NaN must fail every check, so comparisons are written as `!(x <= tol)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod instance_file;
pub mod verify;

pub use commands::{run, Cli};
pub use instance_file::InstanceFile;
pub use verify::{verify_all, verify_instance, ResultRow, VerifyInput, VerifyOptions, VerifyOutcome};

/// Sizes the global worker pool from `ICPKIT_THREADS`, if set to a positive
/// integer.
pub fn init_thread_pool() -> Result<(), String> {
    let Ok(value) = std::env::var("ICPKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("ICPKIT_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}
