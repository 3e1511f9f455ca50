//! Design and certification of delayed-feedback gains that stabilize
//! unstable period-2 cycles of scalar maps.
//!
//! - [`polyroots`]: complex polynomials, Aberth root finding, Schur tests.
//! - [`gains`]: weight/strength representations and the optimal gains.
//! - [`stability`]: characteristic polynomial and the critical multiplier.
//! - [`dynamics`]: open/closed-loop simulation and cycle detection.
//! - [`cli`]: configuration and commands behind the `cyclestab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod gains;
pub mod polyroots;
pub mod stability;

pub use error::{Error, Result};
pub use gains::{ControlGains, HorizonPlan};
pub use polyroots::{ComplexPolynomial, RootSet};

/// Environment variable capping internal parallelism (`0` = automatic).
pub const THREADS_ENV: &str = "CYCLESTAB_THREADS";

/// Sizes the global rayon pool from [`THREADS_ENV`]. Returns the thread
/// count requested, or `None` when the variable is unset, zero or invalid.
pub fn configure_threads_from_env() -> Option<usize> {
    let n: usize = std::env::var(THREADS_ENV).ok()?.trim().parse().ok()?;
    if n == 0 {
        return None;
    }
    // Fails only if the pool was already built; the existing pool stays.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Some(n)
}
