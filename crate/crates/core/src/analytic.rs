//! Closed-form per-stream outage probability and transmission capacity.
//!
//! The outage probability of a spatial-multiplexing link with an MMSE
//! receiver in a Poisson field of interferers has an exact closed form:
//! a double sum over antenna indices whose interference terms are weighted
//! sums over integer partitions, with a gamma-function geometry factor
//! Theta collecting the density, threshold, and path-loss dependence.
//! This module evaluates that expression, inverts it in the density to get
//! the contention density, and assembles the exact and small-outage
//! asymptotic transmission capacity.
//!
//! Everything here is strictly linear-scale; dB conversion happens once at
//! the CLI boundary.

use crate::error::{Error, Result};
use crate::numerics::{find_root_increasing, log_gamma};
use crate::partitions::{enumerate_partitions, multiplicity_profile, Partition};

/// Per-link parameters: antenna counts, SINR threshold, transmit SNR, and
/// transmitter-receiver distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkConfig {
    /// Transmit antennas / independent data streams.
    pub n_t: u32,
    /// Receive antennas.
    pub n_r: u32,
    /// SINR threshold, linear scale: z = 2^R - 1 for rate R.
    pub z: f64,
    /// Transmit SNR, linear scale; `f64::INFINITY` selects the high-SNR
    /// (noise-free) regime.
    pub gamma: f64,
    /// Transmitter-receiver distance.
    pub d0: f64,
}

impl LinkConfig {
    /// Validated constructor. `z = 0` is accepted as the degenerate
    /// zero-rate threshold (outage is then identically zero).
    pub fn new(n_t: u32, n_r: u32, z: f64, gamma: f64, d0: f64) -> Result<Self> {
        if n_t < 1 {
            return Err(Error::Domain("n_t must be at least 1".into()));
        }
        if n_r < 1 || n_r > 64 {
            return Err(Error::Domain(format!("n_r must be in 1..=64, got {n_r}")));
        }
        if n_t > 64 {
            return Err(Error::Domain(format!("n_t must be at most 64, got {n_t}")));
        }
        if !(z >= 0.0) || !z.is_finite() {
            return Err(Error::Domain(format!("z must be finite and >= 0, got {z}")));
        }
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(d0 > 0.0) || !d0.is_finite() {
            return Err(Error::Domain(format!(
                "d0 must be finite and positive, got {d0}"
            )));
        }
        Ok(LinkConfig {
            n_t,
            n_r,
            z,
            gamma,
            d0,
        })
    }

    /// Data rate per stream: R = log2(1 + z).
    pub fn rate(&self) -> f64 {
        (1.0 + self.z).log2()
    }

    /// z d0^alpha / gamma, the noise-to-mean-signal exponent; zero in the
    /// high-SNR regime.
    pub(crate) fn noise_exponent(&self, alpha: f64) -> f64 {
        if self.gamma.is_finite() {
            self.z * self.d0.powf(alpha) / self.gamma
        } else {
            0.0
        }
    }
}

/// Interferer field parameters: transmitter density and path loss exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkParams {
    /// Transmitters per unit area.
    pub lambda: f64,
    /// Path loss exponent; must exceed 2 for the aggregate interference to
    /// be finite.
    pub alpha: f64,
}

impl NetworkParams {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "lambda must be finite and non-negative, got {lambda}"
            )));
        }
        Ok(NetworkParams { lambda, alpha })
    }
}

/// Contention density and capacity at a target outage level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityResult {
    /// Target outage probability.
    pub epsilon: f64,
    /// Largest density sustaining the target outage.
    pub contention_density: f64,
    /// Successful stream-bits per unit area: n_t * lambda(eps) * (1-eps) * R.
    pub exact_capacity: f64,
    /// Small-outage leading-order capacity.
    pub asymptotic_capacity: f64,
    /// Interference-cancelation degrees of freedom, floor(n_r / n_t).
    pub ell: u32,
    /// Leading small-density coefficient of the outage expansion.
    pub omega: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "path loss exponent must be finite and > 2, got {alpha}"
        )));
    }
    Ok(())
}

/// Exact binomial coefficient for n <= 64.
pub(crate) fn binomial_exact(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc as u64
}

fn factorial_f64(m: u32) -> f64 {
    (1..=m).fold(1.0, |acc, v| acc * v as f64)
}

/// Theta: the gamma-function geometry factor multiplying the density in
/// the outage exponent,
/// pi (d0^alpha z)^(2/alpha) Gamma(n_t + 2/alpha) Gamma(1 - 2/alpha) / Gamma(n_t).
///
/// Evaluated in the log domain so that values near alpha = 2 (where
/// Gamma(1 - 2/alpha) blows up) stay representable.
pub fn theta(cfg: &LinkConfig, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let two_over_alpha = 2.0 / alpha;
    let log_ratio = log_gamma(cfg.n_t as f64 + two_over_alpha)? + log_gamma(1.0 - two_over_alpha)?
        - log_gamma(cfg.n_t as f64)?;
    // (d0^alpha z)^(2/alpha) = d0^2 z^(2/alpha); vanishes with z.
    let geometry = cfg.d0 * cfg.d0 * cfg.z.powf(two_over_alpha);
    Ok(std::f64::consts::PI * geometry * log_ratio.exp())
}

/// Per-summand cumulative factors: out[v] is the product over k = 1..=v of
/// (n_t - k + 1)(k - 1 - 2/alpha) / (k (n_t + 2/alpha - k)).
///
/// Once a summand exceeds n_t the (n_t - k + 1) factor is zero and stays
/// zero. The denominator never vanishes because 0 < 2/alpha < 1.
fn summand_factors(n_t: u32, alpha: f64, max_summand: u32) -> Vec<f64> {
    let two_over_alpha = 2.0 / alpha;
    let nt = n_t as f64;
    let mut out = Vec::with_capacity(max_summand as usize + 1);
    out.push(1.0);
    let mut acc = 1.0;
    for k in 1..=max_summand {
        let kf = k as f64;
        acc *= (nt - kf + 1.0) * (kf - 1.0 - two_over_alpha) / (kf * (nt + two_over_alpha - kf));
        out.push(acc);
    }
    out
}

/// Xi: the weight of one integer partition in the outage sum — the product
/// of the per-summand factors divided by the factorials of the summand
/// multiplicities. The empty partition has weight 1.
pub fn xi(p: &Partition, n_t: u32, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n_t < 1 {
        return Err(Error::Domain("n_t must be at least 1".into()));
    }
    let max_summand = p.summands().first().copied().unwrap_or(0);
    let factors = summand_factors(n_t, alpha, max_summand);
    let mut num = 1.0;
    for &s in p.summands() {
        num *= factors[s as usize];
    }
    let mut denom = 1.0;
    for &(_, mult) in multiplicity_profile(p).entries() {
        denom *= factorial_f64(mult);
    }
    Ok(num / denom)
}

/// Sum of Xi over the partitions of each w <= max_w, grouped by summand
/// count: entry [w][m] sums the weights of partitions of w with exactly m
/// summands.
fn xi_sums_by_count(n_t: u32, alpha: f64, max_w: u32) -> Vec<Vec<f64>> {
    let factors = summand_factors(n_t, alpha, max_w);
    let mut table = Vec::with_capacity(max_w as usize + 1);
    for w in 0..=max_w {
        let mut sums = vec![0.0f64; w as usize + 1];
        for p in enumerate_partitions(w).iter() {
            // Skip partitions containing a summand above n_t: their weight
            // is exactly zero.
            if p.summands().first().is_some_and(|&s| s > n_t) {
                continue;
            }
            let mut num = 1.0;
            for &s in p.summands() {
                num *= factors[s as usize];
            }
            let mut denom = 1.0;
            for &(_, mult) in multiplicity_profile(p).entries() {
                denom *= factorial_f64(mult);
            }
            sums[p.num_summands()] += num / denom;
        }
        table.push(sums);
    }
    table
}

/// Precomputed evaluator of the closed-form outage probability for fixed
/// link parameters and path loss exponent, cheap to sweep over densities.
pub struct OutageModel {
    cfg: LinkConfig,
    theta: f64,
    noise_exp: f64,
    /// xi_sums[w][m]: partition-weight sums for the interference terms.
    xi_sums: Vec<Vec<f64>>,
    /// Exact binomial row binom(n_t - 1, q), q = 0..=n_t-1.
    binom_row: Vec<f64>,
    /// (1 + z)^(n_t - 1).
    one_plus_z_pow: f64,
}

impl OutageModel {
    pub fn new(cfg: &LinkConfig, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let theta = theta(cfg, alpha)?;
        let max_w = cfg.n_r - 1;
        Ok(OutageModel {
            cfg: *cfg,
            theta,
            noise_exp: cfg.noise_exponent(alpha),
            xi_sums: xi_sums_by_count(cfg.n_t, alpha, max_w),
            binom_row: (0..cfg.n_t)
                .map(|q| binomial_exact(cfg.n_t - 1, q) as f64)
                .collect(),
            one_plus_z_pow: (1.0 + cfg.z).powi(cfg.n_t as i32 - 1),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn link(&self) -> &LinkConfig {
        &self.cfg
    }

    /// Unchecked evaluation clamped to [0, 1]; used inside the bisection
    /// where the range check has already been exercised at the endpoints.
    fn outage_clamped(&self, lambda: f64) -> f64 {
        self.outage_raw(lambda).clamp(0.0, 1.0)
    }

    fn outage_raw(&self, lambda: f64) -> f64 {
        let n_r = self.cfg.n_r as usize;
        let n_t = self.cfg.n_t as usize;
        let z = self.cfg.z;
        let c = self.noise_exp;
        let t = self.theta * lambda;

        // Total exponent beyond which the survivor factor underflows and
        // the outage is 1 to double precision.
        if c + t > 700.0 {
            return 1.0;
        }

        // powers of (-t), exact at t = 0 so only empty partitions survive
        let mut neg_t_pows = vec![1.0f64; n_r];
        for m in 1..n_r {
            neg_t_pows[m] = neg_t_pows[m - 1] * (-t);
        }
        // per-w partition sums weighted by (-t)^(summand count)
        let mut interference: Vec<f64> = Vec::with_capacity(n_r);
        for w in 0..n_r {
            let sums = &self.xi_sums[w];
            let mut acc = 0.0;
            for (m, &g) in sums.iter().enumerate() {
                acc += g * neg_t_pows[m];
            }
            interference.push(acc);
        }
        // powers of z for the q-sum
        let mut z_pows = vec![1.0f64; n_t];
        for q in 1..n_t {
            z_pows[q] = z_pows[q - 1] * z;
        }

        let mut total = 0.0;
        for p in 0..n_r {
            // noise series: sum_{m=0}^{n_r - p - 1} c^m / m!
            let mut vsum = 0.0;
            let mut term = 1.0;
            for m in 0..(n_r - p) {
                vsum += term;
                term *= c / (m as f64 + 1.0);
            }
            let q_max = p.min(n_t - 1);
            let mut inner = 0.0;
            for q in 0..=q_max {
                inner += self.binom_row[q] * z_pows[q] * interference[p - q];
            }
            total += vsum * inner;
        }
        1.0 - (-(c + t)).exp() * total / self.one_plus_z_pow
    }

    /// Outage probability at transmitter density `lambda`, with an internal
    /// range check: a value outside [-1e-9, 1 + 1e-9] indicates a bug in
    /// the combinatorial assembly and is reported, not clamped away.
    pub fn outage(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "lambda must be finite and non-negative, got {lambda}"
            )));
        }
        let value = self.outage_raw(lambda);
        if !(-1.0e-9..=1.0 + 1.0e-9).contains(&value) {
            return Err(Error::Consistency(format!(
                "outage probability evaluated to {value} at lambda = {lambda}"
            )));
        }
        Ok(value.clamp(0.0, 1.0))
    }
}

/// Per-stream outage probability of the link in the given interferer field.
pub fn outage_probability(cfg: &LinkConfig, net: &NetworkParams) -> Result<f64> {
    OutageModel::new(cfg, net.alpha)?.outage(net.lambda)
}

/// Interference-cancelation degrees of freedom: ell = floor(n_r / n_t),
/// the number of strongest interferers (plus one) the receiver can null
/// while protecting its own streams.
///
/// Also verifies the defining sandwich
/// n_r/(k+1) + 1/(k+1) <= n_t < n_r/k + 1/k at k = ell.
pub fn max_cancelable(n_r: u32, n_t: u32) -> Result<u32> {
    if n_t < 1 {
        return Err(Error::Domain("n_t must be at least 1".into()));
    }
    if n_t > n_r {
        return Err(Error::Domain(format!(
            "n_t = {n_t} exceeds n_r = {n_r}: the receiver cannot null the self-interference of all streams"
        )));
    }
    let ell = n_r / n_t;
    // Exact integer form of the sandwich: n_r + 1 <= n_t (ell + 1) and
    // n_t * ell <= n_r.
    let lower_ok = (n_r as u64 + 1) <= n_t as u64 * (ell as u64 + 1);
    let upper_ok = n_t as u64 * ell as u64 <= n_r as u64;
    if !lower_ok || !upper_ok {
        return Err(Error::Consistency(format!(
            "cancelation DOF sandwich violated for n_r = {n_r}, n_t = {n_t}, ell = {ell}"
        )));
    }
    Ok(ell)
}

/// Omega: the coefficient of the leading (Theta lambda)^ell term in the
/// small-density expansion of the outage probability at high SNR,
/// 1/ell! - (-1)^ell sum_q binom(n_t-1, q) z^q sum_{p=ell}^{n_r-1-q}
/// (partition-weight sums of length ell) / (1+z)^(n_t-1).
///
/// Inner sums with an empty index range contribute zero.
pub fn omega(cfg: &LinkConfig, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let ell = max_cancelable(cfg.n_r, cfg.n_t)?;
    let table = xi_sums_by_count(cfg.n_t, alpha, cfg.n_r - 1);
    let mut outer = 0.0;
    for q in 0..cfg.n_t {
        let hi = cfg.n_r as i64 - 1 - q as i64;
        let mut inner = 0.0;
        let mut p = ell as i64;
        while p <= hi {
            inner += table[p as usize].get(ell as usize).copied().unwrap_or(0.0);
            p += 1;
        }
        outer += binomial_exact(cfg.n_t - 1, q) as f64 * cfg.z.powi(q as i32) * inner;
    }
    let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
    Ok(1.0 / factorial_f64(ell) - sign * outer / (1.0 + cfg.z).powi(cfg.n_t as i32 - 1))
}

const CONTENTION_REL_TOL: f64 = 1e-10;
const BRACKET_DOUBLINGS: u32 = 60;

/// Contention density: the density at which the outage probability equals
/// `epsilon`, found by monotone bisection with an exponentially grown
/// upper bracket.
pub fn contention_density(cfg: &LinkConfig, alpha: f64, epsilon: f64) -> Result<f64> {
    let model = OutageModel::new(cfg, alpha)?;
    contention_density_with(&model, epsilon)
}

pub(crate) fn contention_density_with(model: &OutageModel, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie strictly inside (0, 1), got {epsilon}"
        )));
    }
    let floor = model.outage(0.0)?;
    if epsilon <= floor {
        return Err(Error::InfeasibleEpsilon { epsilon, floor });
    }
    let mut hi = 1.0;
    let mut f_hi = model.outage(hi)?;
    let mut doublings = 0;
    while f_hi < epsilon {
        if doublings >= BRACKET_DOUBLINGS {
            return Err(Error::Bracket {
                target: epsilon,
                f_lo: floor,
                f_hi,
            });
        }
        hi *= 2.0;
        f_hi = model.outage(hi)?;
        doublings += 1;
    }
    find_root_increasing(
        |lambda| model.outage_clamped(lambda),
        epsilon,
        0.0,
        hi,
        CONTENTION_REL_TOL,
    )
}

/// Exact transmission capacity c(eps) = n_t lambda(eps) (1 - eps) R along
/// with the asymptotic value and the ell / Omega intermediates.
pub fn transmission_capacity_exact(
    cfg: &LinkConfig,
    alpha: f64,
    epsilon: f64,
) -> Result<CapacityResult> {
    let lambda = contention_density(cfg, alpha, epsilon)?;
    let ell = max_cancelable(cfg.n_r, cfg.n_t)?;
    let om = omega(cfg, alpha)?;
    let rate = cfg.rate();
    Ok(CapacityResult {
        epsilon,
        contention_density: lambda,
        exact_capacity: cfg.n_t as f64 * lambda * (1.0 - epsilon) * rate,
        asymptotic_capacity: transmission_capacity_asymptotic(cfg, alpha, epsilon)?,
        ell,
        omega: om,
    })
}

/// Leading-order high-SNR transmission capacity
/// n_t R epsilon^(1/ell) / (Theta Omega^(1/ell)).
///
/// The small-density expansion of the outage is eps ~ Omega (Theta
/// lambda)^ell, so the contention density inverts to lambda(eps) =
/// (eps/Omega)^(1/ell) / Theta; the exact/asymptotic ratio then tends to 1
/// as eps -> 0, which the acceptance suite checks against the numerical
/// inversion.
pub fn transmission_capacity_asymptotic(cfg: &LinkConfig, alpha: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "epsilon must lie strictly inside (0, 1), got {epsilon}"
        )));
    }
    if !(cfg.z > 0.0) {
        return Err(Error::Domain(
            "asymptotic capacity requires a positive SINR threshold".into(),
        ));
    }
    let ell = max_cancelable(cfg.n_r, cfg.n_t)?;
    let om = omega(cfg, alpha)?;
    if !(om > 0.0) {
        return Err(Error::Consistency(format!(
            "Omega = {om} must be positive for a valid density expansion"
        )));
    }
    let th = theta(cfg, alpha)?;
    let inv_ell = 1.0 / ell as f64;
    Ok(cfg.n_t as f64 * cfg.rate() * epsilon.powf(inv_ell) / (th * om.powf(inv_ell)))
}
