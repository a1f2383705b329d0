//! Error type shared by all modules.

/// Errors reported by the analytic and simulation routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain (e.g. a path loss
    /// exponent at or below 2, where the interference field diverges).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed (e.g. a Cholesky pivot was not
    /// positive, signalling a degenerate covariance).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A root-finding bracket does not contain the target value.
    #[error("bracket error: target {target} outside [f(lo)={f_lo}, f(hi)={f_hi}]")]
    Bracket { target: f64, f_lo: f64, f_hi: f64 },

    /// The requested outage level lies at or below the noise-limited floor
    /// reached at zero interferer density, so no density can attain it.
    #[error("infeasible epsilon {epsilon}: noise-limited outage floor is {floor}")]
    InfeasibleEpsilon { epsilon: f64, floor: f64 },

    /// An internal invariant was violated; indicates a bug rather than a
    /// bad input (e.g. a probability evaluating outside [0, 1]).
    #[error("consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
