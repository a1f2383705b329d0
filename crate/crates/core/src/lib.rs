//! Per-stream outage probability and transmission capacity of spatial
//! multiplexing MIMO links with MMSE receivers in Poisson ad hoc networks.
//!
//! The library has two independent evaluation routes for the same quantity:
//!
//! - [`analytic`] evaluates the closed-form per-stream outage probability
//!   (an exact expression built from integer-partition sums and gamma
//!   functions), the contention density, and the exact and small-outage
//!   asymptotic transmission capacity.
//! - [`montecarlo`] simulates the underlying system model directly: a
//!   Poisson field of interferers on a truncated disc, i.i.d. Rayleigh
//!   channel matrices, and the MMSE SINR computed through a Hermitian
//!   positive-definite solve. A semi-analytic estimator averages the
//!   conditional (fixed-positions) outage over sampled point patterns.
//!
//! Agreement of the two routes is the central validation of the closed
//! form; the `validate` CLI subcommand and the `acceptance` integration
//! test suite run those cross-checks end to end.
//!
//! Supporting modules: [`partitions`] (integer partition enumeration with
//! multiplicity profiles) and [`numerics`] (log-gamma, complex Gaussian
//! sampling, Cholesky solves, polynomial convolution, bisection).

pub mod analytic;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod numerics;
pub mod partitions;

pub use analytic::{CapacityResult, LinkConfig, NetworkParams};
pub use error::{Error, Result};
pub use montecarlo::OutageEstimate;
