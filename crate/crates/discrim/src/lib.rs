//! Binary discrimination of tensor-product quantum states with local adaptive
//! measurements.
//!
//! The crate provides:
//! - [`quantum`]: real density matrices, pure-state constructors, the
//!   depolarizing channel, tensor products, and symmetric eigendecomposition;
//! - [`measurements`]: Helstrom / modified-Helstrom measurements and the
//!   quantized qubit and qutrit action spaces;
//! - [`belief`]: Bayesian prior tracking and the log-likelihood-ratio form;
//! - [`greedy`]: the Locally Greedy (LG) and Modified Locally Greedy (MLG)
//!   strategies with exact outcome-tree evaluation;
//! - [`dp`]: belief-grid dynamic programming — order-optimized MLG and the
//!   MOODY best/worst-ordering planners, with policy persistence;
//! - [`bounds`]: joint-Helstrom and closed-form reference values;
//! - [`experiments`]: the seeded Monte Carlo figure harness with CSV output.

pub mod belief;
pub mod bounds;
pub mod dp;
pub mod error;
pub mod experiments;
pub mod greedy;
pub mod measurements;
pub mod problem;
pub mod quantum;

pub use error::{Error, Result};
