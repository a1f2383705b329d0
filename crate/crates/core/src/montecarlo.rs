//! Direct simulation of the system model and a semi-analytic estimator.
//!
//! The full Monte Carlo path draws a Poisson field of interferers on a
//! truncated disc, fresh Rayleigh channels for the typical link and every
//! interferer, and computes the per-stream MMSE SINR through a Cholesky
//! solve of the interference-plus-noise covariance. The semi-analytic path
//! replaces the channel averaging with the exact conditional
//! (fixed-positions) outage and only samples point patterns, which removes
//! the channel noise from the estimate.
//!
//! Trials are keyed by index: trial t of seed s draws from an independent
//! counter-based substream, so estimates are bit-identical for any number
//! of worker threads.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::analytic::{binomial_exact, LinkConfig, NetworkParams};
use crate::error::{Error, Result};
use crate::numerics::{
    cholesky_lower_in_place, fill_complex_gaussian, forward_substitute,
    mul_monic_truncated_in_place, trial_rng, SimRng,
};

/// One draw of the interferer field: locations inside a disc of the given
/// radius centered on the typical receiver.
#[derive(Clone, Debug)]
pub struct PppRealization {
    radius: f64,
    points: Vec<[f64; 2]>,
}

impl PppRealization {
    /// Wrap explicit interferer locations (used to freeze a configuration).
    /// Every point must lie inside the disc.
    pub fn new(radius: f64, points: Vec<[f64; 2]>) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!(
                "radius must be positive, got {radius}"
            )));
        }
        for (i, p) in points.iter().enumerate() {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            if r > radius * (1.0 + 1e-12) {
                return Err(Error::Domain(format!(
                    "point {i} at distance {r} lies outside the disc of radius {radius}"
                )));
            }
        }
        Ok(PppRealization { radius, points })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }
}

/// MMSE output SINR for one stream of one snapshot.
#[derive(Clone, Copy, Debug)]
pub struct SinrSample {
    /// Linear SINR; `f64::INFINITY` when the receiver has a noise-free,
    /// interference-free subspace (only possible at infinite SNR).
    pub sinr: f64,
    /// 1-based stream index in [1, n_t].
    pub stream_index: u32,
}

/// Monte Carlo outage estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct OutageEstimate {
    pub probability: f64,
    pub trials: u64,
    pub std_error: f64,
}

impl OutageEstimate {
    /// Binomial estimate from an outage count.
    fn from_bernoulli(count: u64, trials: u64) -> Self {
        let p = count as f64 / trials as f64;
        OutageEstimate {
            probability: p,
            trials,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    /// Mean of per-realization probabilities with the sample standard
    /// error (strictly smaller than the binomial error of an indicator
    /// estimator unless every value is 0 or 1).
    fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        OutageEstimate {
            probability: mean,
            trials: values.len() as u64,
            std_error: (var / n).sqrt(),
        }
    }
}

// ---------------------------------------------------------------------
// Truncation and sampling
// ---------------------------------------------------------------------

/// Simulation disc radius: max(25 d0, r*) where r* bounds the mean
/// far-field interference. At finite SNR the neglected mean
/// interference-to-noise ratio beyond r* is `delta`; at infinite SNR the
/// bound is taken against the mean desired signal power instead.
pub fn truncation_radius(net: &NetworkParams, cfg: &LinkConfig, delta: f64) -> Result<f64> {
    if !(net.alpha > 2.0) {
        return Err(Error::Domain(format!(
            "far-field interference integral diverges for alpha = {} <= 2",
            net.alpha
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let alpha = net.alpha;
    let base = 2.0 * std::f64::consts::PI * cfg.n_t as f64 * net.lambda / (alpha - 2.0);
    let r_star = if net.lambda == 0.0 {
        0.0
    } else if cfg.gamma.is_finite() {
        // mean INR beyond r: gamma n_t lambda 2 pi r^(2-alpha) / (alpha-2) = delta
        (cfg.gamma * base / delta).powf(1.0 / (alpha - 2.0))
    } else {
        // mean interference over mean desired power n_r / d0^alpha
        (base * cfg.d0.powf(alpha) / (cfg.n_r as f64 * delta)).powf(1.0 / (alpha - 2.0))
    };
    Ok((25.0 * cfg.d0).max(r_star))
}

fn sample_ppp_into<R: Rng + ?Sized>(
    poisson: Option<&Poisson<f64>>,
    radius: f64,
    rng: &mut R,
    points: &mut Vec<[f64; 2]>,
) {
    points.clear();
    let count = match poisson {
        Some(p) => p.sample(rng) as u64,
        None => 0,
    };
    points.reserve(count as usize);
    for _ in 0..count {
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        let r = radius * u.sqrt();
        let (sin, cos) = (2.0 * std::f64::consts::PI * v).sin_cos();
        points.push([r * cos, r * sin]);
    }
}

fn poisson_for(lambda: f64, radius: f64) -> Result<Option<Poisson<f64>>> {
    let mean = lambda * std::f64::consts::PI * radius * radius;
    if mean == 0.0 {
        return Ok(None);
    }
    Poisson::new(mean)
        .map(Some)
        .map_err(|e| Error::Domain(format!("invalid Poisson mean {mean}: {e}")))
}

/// Draw one interferer field: a Poisson number of points, independently
/// uniform on the disc (square-root radial inverse transform).
pub fn sample_ppp<R: Rng + ?Sized>(
    net: &NetworkParams,
    radius: f64,
    rng: &mut R,
) -> PppRealization {
    let poisson = poisson_for(net.lambda, radius).expect("disc radius must be positive");
    let mut points = Vec::new();
    sample_ppp_into(poisson.as_ref(), radius, rng, &mut points);
    PppRealization { radius, points }
}

// ---------------------------------------------------------------------
// MMSE SINR
// ---------------------------------------------------------------------

struct SinrScratch {
    cov: Vec<Complex64>,
    desired: Vec<Complex64>,
    col: Vec<Complex64>,
}

impl SinrScratch {
    fn new(n_r: usize) -> Self {
        SinrScratch {
            cov: vec![Complex64::default(); n_r * n_r],
            desired: vec![Complex64::default(); n_r],
            col: vec![Complex64::default(); n_r],
        }
    }
}

/// R += w * col col^H, lower triangle only.
#[inline]
fn accumulate_lower(cov: &mut [Complex64], n: usize, w: f64, col: &[Complex64]) {
    for i in 0..n {
        let ci = col[i] * w;
        let row = &mut cov[i * n..i * n + i + 1];
        for (j, slot) in row.iter_mut().enumerate() {
            *slot += ci * col[j].conj();
        }
    }
}

fn mmse_sinr_value<R: Rng + ?Sized>(
    cfg: &LinkConfig,
    alpha: f64,
    points: &[[f64; 2]],
    rng: &mut R,
    stream_k: u32,
    scratch: &mut SinrScratch,
) -> Result<f64> {
    let n_r = cfg.n_r as usize;
    let n_t = cfg.n_t;
    let finite = cfg.gamma.is_finite();
    // At infinite SNR the covariance is evaluated divided by gamma, which
    // drops the identity term; the desired-signal prefactor scales the
    // same way, so the SINR is unchanged.
    let snr_scale = if finite { cfg.gamma } else { 1.0 };
    let d0_loss = cfg.d0.powf(-alpha);
    let self_weight = snr_scale * d0_loss;

    scratch.cov.fill(Complex64::default());

    // typical transmitter: all n_t columns in stream order
    for q in 1..=n_t {
        fill_complex_gaussian(rng, &mut scratch.col);
        if q == stream_k {
            scratch.desired.copy_from_slice(&scratch.col);
        } else {
            accumulate_lower(&mut scratch.cov, n_r, self_weight, &scratch.col);
        }
    }
    // interferers, in realization order
    let half_alpha = 0.5 * alpha;
    for p in points {
        let r_sq = p[0] * p[0] + p[1] * p[1];
        let w = snr_scale * r_sq.powf(-half_alpha);
        for _ in 0..n_t {
            fill_complex_gaussian(rng, &mut scratch.col);
            accumulate_lower(&mut scratch.cov, n_r, w, &scratch.col);
        }
    }

    if finite {
        for i in 0..n_r {
            scratch.cov[i * n_r + i] += 1.0;
        }
    } else {
        // Interference-only covariance: rank (n_t - 1) + L n_t almost
        // surely. Short of full rank there is an interference-free
        // dimension and the noise-free SINR is unbounded.
        let rank = (n_t as usize - 1) + points.len() * n_t as usize;
        if rank < n_r {
            return Ok(f64::INFINITY);
        }
    }

    match cholesky_lower_in_place(&mut scratch.cov, n_r) {
        Ok(()) => {}
        Err(_) if !finite => return Ok(f64::INFINITY),
        Err(e) => {
            return Err(Error::Numerical(format!(
                "covariance solve failed with {} interferers: {e}",
                points.len()
            )))
        }
    }
    forward_substitute(&scratch.cov, n_r, &mut scratch.desired);
    let quad: f64 = scratch.desired.iter().map(|z| z.norm_sqr()).sum();
    Ok(self_weight * quad)
}

/// MMSE output SINR of stream `stream_k` (1-based) for one snapshot:
/// fresh channels are drawn for the typical transmitter and every
/// interferer in the realization, and the quadratic form is evaluated
/// through a Hermitian positive-definite solve, never an explicit inverse.
pub fn mmse_sinr<R: Rng + ?Sized>(
    cfg: &LinkConfig,
    alpha: f64,
    realization: &PppRealization,
    rng: &mut R,
    stream_k: u32,
) -> Result<SinrSample> {
    if stream_k < 1 || stream_k > cfg.n_t {
        return Err(Error::Domain(format!(
            "stream index {stream_k} outside [1, {}]",
            cfg.n_t
        )));
    }
    if !(alpha > 2.0) {
        return Err(Error::Domain(format!("alpha must exceed 2, got {alpha}")));
    }
    let mut scratch = SinrScratch::new(cfg.n_r as usize);
    let sinr = mmse_sinr_value(
        cfg,
        alpha,
        realization.points(),
        rng,
        stream_k,
        &mut scratch,
    )?;
    Ok(SinrSample {
        sinr,
        stream_index: stream_k,
    })
}

// ---------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------

fn check_trials(trials: u64) -> Result<()> {
    if trials < 1 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    Ok(())
}

pub(crate) fn simulate_outage_stream(
    cfg: &LinkConfig,
    net: &NetworkParams,
    trials: u64,
    seed: u64,
    delta: f64,
    stream_k: u32,
) -> Result<OutageEstimate> {
    check_trials(trials)?;
    if stream_k < 1 || stream_k > cfg.n_t {
        return Err(Error::Domain(format!(
            "stream index {stream_k} outside [1, {}]",
            cfg.n_t
        )));
    }
    let radius = truncation_radius(net, cfg, delta)?;
    let poisson = poisson_for(net.lambda, radius)?;
    let n_r = cfg.n_r as usize;
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map_init(
            || (SinrScratch::new(n_r), Vec::new()),
            |(scratch, points), trial| {
                let mut rng: SimRng = trial_rng(seed, trial);
                sample_ppp_into(poisson.as_ref(), radius, &mut rng, points);
                let sinr = mmse_sinr_value(cfg, net.alpha, points, &mut rng, stream_k, scratch)
                    .map_err(|e| Error::Numerical(format!("trial {trial}: {e}")))?;
                Ok(sinr <= cfg.z)
            },
        )
        .collect::<Result<Vec<bool>>>()?;
    let count = outcomes.iter().filter(|&&b| b).count() as u64;
    Ok(OutageEstimate::from_bernoulli(count, trials))
}

/// Full Monte Carlo outage estimate: the fraction of independent snapshots
/// whose stream-1 SINR falls at or below the threshold (the per-stream
/// outage is the same for every stream by symmetry). Deterministic for a
/// fixed seed regardless of parallelism.
pub fn simulate_outage(
    cfg: &LinkConfig,
    net: &NetworkParams,
    trials: u64,
    seed: u64,
    delta: f64,
) -> Result<OutageEstimate> {
    simulate_outage_stream(cfg, net, trials, seed, delta, 1)
}

// ---------------------------------------------------------------------
// Conditional outage and the semi-analytic estimator
// ---------------------------------------------------------------------

/// Exact outage probability conditioned on the interferer distances,
/// supplied as their alpha-th powers x_i = |D_i|^alpha.
///
/// The coefficient extraction multiplies out
/// (1 + d0^-alpha z')^(n_t-1) prod_i (1 + x_i^-1 z')^n_t
/// keeping powers below n_r (higher powers never contribute), and the
/// denominator product is accumulated in the log domain so very dense
/// interferer sets underflow gracefully toward outage 1 instead of
/// overflowing.
pub fn conditional_outage(cfg: &LinkConfig, alpha: f64, distances_alpha: &[f64]) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "alpha must be finite and > 2, got {alpha}"
        )));
    }
    for (i, &x) in distances_alpha.iter().enumerate() {
        if !(x > 0.0) {
            return Err(Error::Domain(format!(
                "conditioned distance power {i} must be positive, got {x}"
            )));
        }
    }
    let mut coeffs = vec![0.0f64; cfg.n_r as usize];
    let value = conditional_outage_core(cfg, alpha, distances_alpha.iter().copied(), &mut coeffs);
    if !(-1.0e-9..=1.0 + 1.0e-9).contains(&value) {
        return Err(Error::Consistency(format!(
            "conditional outage evaluated to {value}"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

const COEFF_RESCALE_THRESHOLD: f64 = 1e250;

fn conditional_outage_core(
    cfg: &LinkConfig,
    alpha: f64,
    xs: impl Iterator<Item = f64>,
    coeffs: &mut Vec<f64>,
) -> f64 {
    let n_r = cfg.n_r as usize;
    let n_t = cfg.n_t;
    let z = cfg.z;
    let d0a = cfg.d0.powf(alpha);
    let c = cfg.noise_exponent(alpha);

    coeffs.clear();
    coeffs.resize(n_r, 0.0);
    coeffs[0] = 1.0;
    let mut log_scale = 0.0f64;

    // self-interference factor (1 + d0^-alpha z')^(n_t - 1)
    let max_pow = n_r - 1;
    let mut factor = Vec::with_capacity(n_t as usize + 1);
    if n_t > 1 {
        factor.push(1.0);
        let inv_d0a = 1.0 / d0a;
        let mut p = 1.0;
        for j in 1..=(n_t - 1).min(max_pow as u32) {
            p *= inv_d0a;
            factor.push(binomial_exact(n_t - 1, j) as f64 * p);
        }
        mul_monic_truncated_in_place(coeffs, &factor);
    }

    let mut log_denom = (n_t as f64 - 1.0) * (1.0 + z).ln();
    for x in xs {
        let inv = 1.0 / x;
        factor.clear();
        factor.push(1.0);
        let mut p = 1.0;
        for j in 1..=n_t.min(max_pow as u32) {
            p *= inv;
            factor.push(binomial_exact(n_t, j) as f64 * p);
        }
        mul_monic_truncated_in_place(coeffs, &factor);
        log_denom += n_t as f64 * (d0a * inv * z).ln_1p();
        // keep the coefficient magnitudes representable for dense fields
        let max = coeffs.iter().fold(0.0f64, |m, &v| m.max(v));
        if max > COEFF_RESCALE_THRESHOLD {
            let inv_scale = 1.0 / COEFF_RESCALE_THRESHOLD;
            for v in coeffs.iter_mut() {
                *v *= inv_scale;
            }
            log_scale += COEFF_RESCALE_THRESHOLD.ln();
        }
    }

    let log_zd0a = (z * d0a).ln(); // -inf at z = 0; the p = 0 term skips it
    let mut total = 0.0;
    for p in 0..n_r {
        let mut vsum = 0.0;
        let mut term = 1.0;
        for m in 0..(n_r - p) {
            vsum += term;
            term *= c / (m as f64 + 1.0);
        }
        let power_part = if p == 0 { 0.0 } else { p as f64 * log_zd0a };
        let log_term = power_part + coeffs[p].ln() + log_scale - log_denom;
        total += vsum * log_term.exp();
    }
    1.0 - (-c).exp() * total
}

/// Semi-analytic outage estimate: the mean of the conditional outage over
/// sampled interferer fields. Unbiased for the same quantity as
/// [`simulate_outage`] with the channel randomness integrated out exactly,
/// so its standard error is strictly smaller at equal realization counts.
pub fn simulate_outage_semianalytic(
    cfg: &LinkConfig,
    net: &NetworkParams,
    trials: u64,
    seed: u64,
    delta: f64,
) -> Result<OutageEstimate> {
    check_trials(trials)?;
    let radius = truncation_radius(net, cfg, delta)?;
    let poisson = poisson_for(net.lambda, radius)?;
    let half_alpha = 0.5 * net.alpha;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(points, coeffs): &mut (Vec<[f64; 2]>, Vec<f64>), trial| {
                let mut rng: SimRng = trial_rng(seed, trial);
                sample_ppp_into(poisson.as_ref(), radius, &mut rng, points);
                let xs = points
                    .iter()
                    .map(|p| (p[0] * p[0] + p[1] * p[1]).powf(half_alpha));
                let value = conditional_outage_core(cfg, net.alpha, xs, coeffs);
                if !(-1.0e-9..=1.0 + 1.0e-9).contains(&value) {
                    return Err(Error::Consistency(format!(
                        "trial {trial}: conditional outage evaluated to {value}"
                    )));
                }
                Ok(value.clamp(0.0, 1.0))
            },
        )
        .collect::<Result<Vec<f64>>>()?;
    Ok(OutageEstimate::from_values(&values))
}
