//! Second order asymptotical regularization (SOAR) for linear ill-posed
//! problems `A x = y` with noisy data.
//!
//! The regularized solution follows the damped flow
//! `x'' + eta x' + A^T A x = A^T y_delta` and is stopped early, either a
//! priori or by a discrepancy rule. The crate contains the spectral filter
//! calculus of the flow, six iterative solvers, stopping rules, a finite
//! element test problem and a small benchmark harness.
//!
//! ```
//! use soar::filters::{evaluate_filters, DampingConfig};
//!
//! let cfg = DampingConfig::new(4.0, 1.0)?;
//! let f = evaluate_filters(&cfg, 0.1, 0.5)?;
//! assert!((f.r - (1.0 - 0.5 * f.g)).abs() < 1e-12);
//! # Ok::<(), soar::SoarError>(())
//! ```

pub mod bench;
pub mod error;
pub mod filters;
pub mod operator;
pub mod problems;
pub mod solvers;
pub mod stopping;
mod vecops;

pub use error::{Result, SoarError};
pub use operator::DenseOperator;

/// The guide chapters under `book/src`, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/filters.md")]
    mod filters {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/stopping.md")]
    mod stopping {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/bench.md")]
    mod bench {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
