//! C ABI for the outage/capacity library.
//!
//! The surface is a single opaque model handle carrying the link and
//! network parameters, a set of evaluation calls writing through out
//! pointers, and integer status codes. A thread-local message describes
//! the most recent failure in detail.
//!
//! All functions are safe to call from any thread; handles are immutable
//! after construction and may be shared across threads.

use std::cell::RefCell;
use std::ffi::CString;
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::{c_char, size_t};

use spatmux::analytic::{
    contention_density, max_cancelable, omega, outage_probability, theta,
    transmission_capacity_exact, LinkConfig, NetworkParams,
};
use spatmux::error::Error;
use spatmux::montecarlo::{conditional_outage, simulate_outage, simulate_outage_semianalytic};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpxStatus {
    /// Success.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter lies outside its mathematical domain.
    Domain = 2,
    /// The requested outage level is below the noise-limited floor.
    Infeasible = 3,
    /// A root-finding bracket could not be established.
    Bracket = 4,
    /// A numerical procedure failed.
    Numerical = 5,
    /// An internal invariant was violated (library bug).
    Internal = 6,
}

/// Opaque handle: link parameters plus interferer-field parameters.
pub struct SpxModel {
    cfg: LinkConfig,
    net: NetworkParams,
}

/// Contention density and capacity at one target outage level.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SpxCapacity {
    pub epsilon: f64,
    pub contention_density: f64,
    pub exact_capacity: f64,
    pub asymptotic_capacity: f64,
    pub ell: u32,
    pub omega: f64,
}

/// Monte Carlo estimate with its standard error.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SpxOutageEstimate {
    pub probability: f64,
    pub std_error: f64,
    pub trials: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> SpxStatus {
    match err {
        Error::Domain(_) => SpxStatus::Domain,
        Error::InfeasibleEpsilon { .. } => SpxStatus::Infeasible,
        Error::Bracket { .. } => SpxStatus::Bracket,
        Error::Numerical(_) => SpxStatus::Numerical,
        Error::Consistency(_) => SpxStatus::Internal,
    }
}

fn fail(err: Error) -> SpxStatus {
    set_last_error(&err.to_string());
    status_of(&err)
}

/// Run a fallible body, converting panics into `Internal` so they never
/// unwind across the C boundary.
fn guarded<F: FnOnce() -> SpxStatus>(body: F) -> SpxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            SpxStatus::Internal
        }
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn spx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn spx_status_message(status: SpxStatus) -> *const c_char {
    let s: &'static str = match status {
        SpxStatus::Ok => "ok\0",
        SpxStatus::NullPointer => "null pointer argument\0",
        SpxStatus::Domain => "parameter outside its domain\0",
        SpxStatus::Infeasible => "target outage below the noise-limited floor\0",
        SpxStatus::Bracket => "root bracket not found\0",
        SpxStatus::Numerical => "numerical failure\0",
        SpxStatus::Internal => "internal error\0",
    };
    s.as_ptr() as *const c_char
}

/// Copy the most recent error message of this thread into `buf`
/// (NUL-terminated, truncated to `cap` bytes). Returns the full message
/// length in bytes excluding the NUL, regardless of truncation. A null
/// or zero-capacity buffer just queries the length.
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes when non-null.
#[no_mangle]
pub unsafe extern "C" fn spx_last_error(buf: *mut c_char, cap: size_t) -> size_t {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Create a model handle.
///
/// `gamma` is the linear transmit SNR; pass INFINITY for the high-SNR
/// regime. `lambda` is the transmitter density and `alpha` the path loss
/// exponent (> 2). On success writes the handle through `out`; release it
/// with `spx_model_free`.
///
/// # Safety
/// `out` must be a valid pointer to a `SpxModel*` slot.
#[no_mangle]
pub unsafe extern "C" fn spx_model_new(
    n_t: u32,
    n_r: u32,
    z: f64,
    gamma: f64,
    d0: f64,
    lambda: f64,
    alpha: f64,
    out: *mut *mut SpxModel,
) -> SpxStatus {
    if out.is_null() {
        set_last_error("out handle pointer is null");
        return SpxStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| {
        let cfg = match LinkConfig::new(n_t, n_r, z, gamma, d0) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        let net = match NetworkParams::new(lambda, alpha) {
            Ok(n) => n,
            Err(e) => return fail(e),
        };
        *out = Box::into_raw(Box::new(SpxModel { cfg, net }));
        SpxStatus::Ok
    }))
}

/// Release a handle created by `spx_model_new`. A null handle is a no-op.
///
/// # Safety
/// `model` must be null or a pointer previously returned by
/// `spx_model_new` that has not yet been freed.
#[no_mangle]
pub unsafe extern "C" fn spx_model_free(model: *mut SpxModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn with_model<T>(
    model: *const SpxModel,
    out: *mut T,
    body: impl FnOnce(&SpxModel) -> Result<T, Error>,
) -> SpxStatus {
    if model.is_null() || out.is_null() {
        set_last_error("model or out pointer is null");
        return SpxStatus::NullPointer;
    }
    guarded(AssertUnwindSafe(|| match body(&*model) {
        Ok(v) => {
            *out = v;
            SpxStatus::Ok
        }
        Err(e) => fail(e),
    }))
}

/// Closed-form per-stream outage probability at the model's density.
///
/// # Safety
/// `model` must be a live handle; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn spx_outage_probability(
    model: *const SpxModel,
    out: *mut f64,
) -> SpxStatus {
    with_model(model, out, |m| outage_probability(&m.cfg, &m.net))
}

/// The gamma-function geometry factor multiplying the density in the
/// outage exponent.
///
/// # Safety
/// `model` must be a live handle; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn spx_theta(model: *const SpxModel, out: *mut f64) -> SpxStatus {
    with_model(model, out, |m| theta(&m.cfg, m.net.alpha))
}

/// Leading small-density coefficient of the outage expansion.
///
/// # Safety
/// `model` must be a live handle; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn spx_omega(model: *const SpxModel, out: *mut f64) -> SpxStatus {
    with_model(model, out, |m| omega(&m.cfg, m.net.alpha))
}

/// Interference-cancelation degrees of freedom floor(n_r / n_t).
///
/// # Safety
/// `model` must be a live handle; `out` must point to a writable u32.
#[no_mangle]
pub unsafe extern "C" fn spx_max_cancelable(model: *const SpxModel, out: *mut u32) -> SpxStatus {
    with_model(model, out, |m| max_cancelable(m.cfg.n_r, m.cfg.n_t))
}

/// Density at which the outage probability reaches `epsilon`.
///
/// # Safety
/// `model` must be a live handle; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn spx_contention_density(
    model: *const SpxModel,
    epsilon: f64,
    out: *mut f64,
) -> SpxStatus {
    with_model(model, out, |m| {
        contention_density(&m.cfg, m.net.alpha, epsilon)
    })
}

/// Exact and asymptotic transmission capacity at `epsilon`.
///
/// # Safety
/// `model` must be a live handle; `out` must point to a writable
/// `SpxCapacity`.
#[no_mangle]
pub unsafe extern "C" fn spx_transmission_capacity(
    model: *const SpxModel,
    epsilon: f64,
    out: *mut SpxCapacity,
) -> SpxStatus {
    with_model(model, out, |m| {
        transmission_capacity_exact(&m.cfg, m.net.alpha, epsilon).map(|r| SpxCapacity {
            epsilon: r.epsilon,
            contention_density: r.contention_density,
            exact_capacity: r.exact_capacity,
            asymptotic_capacity: r.asymptotic_capacity,
            ell: r.ell,
            omega: r.omega,
        })
    })
}

/// Monte Carlo outage estimate. `semianalytic` selects the
/// conditional-outage estimator (channel averaging done in closed form);
/// otherwise the full system simulation runs. Deterministic in
/// (seed, trials) independent of threading.
///
/// # Safety
/// `model` must be a live handle; `out` must point to a writable
/// `SpxOutageEstimate`.
#[no_mangle]
pub unsafe extern "C" fn spx_simulate_outage(
    model: *const SpxModel,
    trials: u64,
    seed: u64,
    delta: f64,
    semianalytic: bool,
    out: *mut SpxOutageEstimate,
) -> SpxStatus {
    with_model(model, out, |m| {
        let est = if semianalytic {
            simulate_outage_semianalytic(&m.cfg, &m.net, trials, seed, delta)?
        } else {
            simulate_outage(&m.cfg, &m.net, trials, seed, delta)?
        };
        Ok(SpxOutageEstimate {
            probability: est.probability,
            std_error: est.std_error,
            trials: est.trials,
        })
    })
}

/// Outage probability conditioned on fixed interferer distances, supplied
/// as their alpha-th powers x_i = |D_i|^alpha. `distances_alpha` may be
/// null when `len` is zero.
///
/// # Safety
/// `model` must be a live handle; `distances_alpha` must point to `len`
/// readable f64 values when `len > 0`; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn spx_conditional_outage(
    model: *const SpxModel,
    distances_alpha: *const f64,
    len: size_t,
    out: *mut f64,
) -> SpxStatus {
    if len > 0 && distances_alpha.is_null() {
        set_last_error("distances_alpha is null with nonzero length");
        return SpxStatus::NullPointer;
    }
    let xs: &[f64] = if len == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(distances_alpha, len)
    };
    with_model(model, out, |m| conditional_outage(&m.cfg, m.net.alpha, xs))
}
