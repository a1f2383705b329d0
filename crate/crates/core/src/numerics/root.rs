//! Bracketed bisection for monotone nondecreasing functions.

use crate::error::{Error, Result};

/// Absolute floor for the relative-width stopping rule, so roots at or
/// near zero still terminate.
const LO_GUARD: f64 = 1e-300;

const MAX_BISECTIONS: usize = 2000;

/// Find x in [lo, hi] with f(x) = target for monotone nondecreasing f.
///
/// Plain bisection: robust to flat regions and needing no derivative. The
/// bracket is shrunk until its width is at most
/// `rel_tol * max(|midpoint|, guard)`; the midpoint is returned.
pub fn find_root_increasing<F>(f: F, target: f64, lo: f64, hi: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo <= hi) {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::Domain(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if !(f_lo <= target && target <= f_hi) {
        return Err(Error::Bracket { target, f_lo, f_hi });
    }

    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(LO_GUARD) {
            return Ok(mid);
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
