//! Shared numerical kernels: log-gamma, complex Gaussian sampling,
//! Hermitian positive-definite solves, polynomial coefficient arithmetic,
//! and bracketed root finding.

mod gamma;
mod linalg;
mod poly;
mod rng;
mod root;

pub use gamma::log_gamma;
pub use linalg::{hermitian_solve, ComplexMatrix};
pub use poly::{poly_mul, RealPolynomial};
pub use rng::{fill_complex_gaussian, sample_complex_gaussian, trial_rng, SimRng};
pub use root::find_root_increasing;

pub(crate) use linalg::{cholesky_lower_in_place, forward_substitute};
pub(crate) use poly::mul_monic_truncated_in_place;
