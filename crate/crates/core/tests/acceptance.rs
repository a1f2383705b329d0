//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line with its measured values (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! Monte Carlo criteria default to their full trial counts; set
//! SPATMUX_ACCEPT_SCALE to a value in (0, 1] to shrink them for quick
//! development runs (the 3-sigma gates scale accordingly and stay valid).

use std::time::Instant;

use clap::Parser;
use rand::Rng;

use spatmux::analytic::{
    contention_density, max_cancelable, outage_probability, theta,
    transmission_capacity_asymptotic, transmission_capacity_exact, LinkConfig, NetworkParams,
    OutageModel,
};
use spatmux::cli::{render, Cli};
use spatmux::montecarlo::{
    conditional_outage, mmse_sinr, sample_ppp, simulate_outage, simulate_outage_semianalytic,
    truncation_radius, PppRealization,
};
use spatmux::numerics::trial_rng;
use spatmux::partitions::{enumerate_partitions, multiplicity_profile};

fn scaled(default: u64) -> u64 {
    let scale = std::env::var("SPATMUX_ACCEPT_SCALE")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .unwrap_or(1.0)
        .clamp(1e-4, 1.0);
    ((default as f64 * scale) as u64).max(200)
}

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "{} {criterion}: {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "{criterion}: {detail}");
}

fn fig1_link(n_t: u32) -> LinkConfig {
    LinkConfig::new(n_t, 4, 1.0, 100.0, 1.0).unwrap()
}

fn fig2_link(n_t: u32) -> LinkConfig {
    LinkConfig::new(n_t, 4, 10.0, f64::INFINITY, 1.0).unwrap()
}

const FIG1_ALPHA: f64 = 4.6;
const FIG2_ALPHA: f64 = 4.5;

/// Transmitter densities at which the analytic outage spans [lo, hi],
/// log-spaced, `n` points.
fn density_span(link: &LinkConfig, alpha: f64, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let lam_lo = contention_density(link, alpha, lo).unwrap();
    let lam_hi = contention_density(link, alpha, hi).unwrap();
    (0..n)
        .map(|i| lam_lo * (lam_hi / lam_lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn criterion_1_partition_fidelity() {
    // warm the cache so the timed pass measures pure queries
    let _ = enumerate_partitions(4);
    let start = Instant::now();
    let parts = enumerate_partitions(4);
    let order: Vec<Vec<u32>> = parts.iter().map(|p| p.summands().to_vec()).collect();
    let expected = vec![
        vec![4],
        vec![3, 1],
        vec![2, 2],
        vec![2, 1, 1],
        vec![1, 1, 1, 1],
    ];
    let h234 = parts[2].summands()[1];
    let h244 = parts[3].summands()[1];
    let len3 = parts[2].num_summands();
    let count = parts.len();
    let g134 = multiplicity_profile(&parts[2]).entries()[0].1;
    let g154 = multiplicity_profile(&parts[4]).entries()[0].1;
    let distinct3 = multiplicity_profile(&parts[2]).num_distinct();
    let elapsed = start.elapsed();
    let ok = order == expected
        && h234 == 2
        && h244 == 1
        && len3 == 2
        && count == 5
        && g134 == 2
        && g154 == 4
        && distinct3 == 1
        && elapsed.as_micros() < 1000;
    report(
        "criterion-1 partition-fidelity",
        ok,
        &format!(
            "order={order:?} h(2,3,4)={h234} h(2,4,4)={h244} |h(.,3,4)|={len3} |h(.,.,4)|={count} \
             g(1,3,4)={g134} g(1,5,4)={g154} |g(.,3,4)|={distinct3} in {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_2_collapse_identities() {
    let start = Instant::now();
    let mut rng = trial_rng(0x5150, 0);
    let mut worst_siso = 0.0f64;
    let mut worst_noise = 0.0f64;
    for _ in 0..100 {
        let z = 10f64.powf(rng.gen_range(-2.0..2.0));
        let d0: f64 = rng.gen_range(0.3..3.0);
        let alpha = rng.gen_range(2.1..6.0);
        let gamma = 10f64.powf(rng.gen_range(0.0..3.0));
        let lambda = rng.gen_range(0.0..1.0);

        let link = LinkConfig::new(1, 1, z, gamma, d0).unwrap();
        let th = theta(&link, alpha).unwrap();
        let closed = 1.0 - (-(z * d0.powf(alpha) / gamma + th * lambda)).exp();
        let got = outage_probability(&link, &NetworkParams::new(lambda, alpha).unwrap()).unwrap();
        worst_siso = worst_siso.max((got - closed).abs());

        let n_r = rng.gen_range(1..=8u32);
        let link = LinkConfig::new(1, n_r, z, gamma, d0).unwrap();
        let c = z * d0.powf(alpha) / gamma;
        let mut series = 0.0;
        let mut term = 1.0;
        for p in 0..n_r {
            series += term;
            term *= c / (p as f64 + 1.0);
        }
        let closed = 1.0 - (-c).exp() * series;
        let got = outage_probability(&link, &NetworkParams::new(0.0, alpha).unwrap()).unwrap();
        worst_noise = worst_noise.max((got - closed).abs());
    }
    let elapsed = start.elapsed();
    let ok = worst_siso <= 1e-12 && worst_noise <= 1e-12 && elapsed.as_secs_f64() < 1.0;
    report(
        "criterion-2 collapse-identities",
        ok,
        &format!(
            "max|single-antenna defect|={worst_siso:.2e} max|noise-only defect|={worst_noise:.2e} \
             over 100 random points in {elapsed:?} (bound 1e-12)"
        ),
    );
}

#[test]
fn criterion_3_closed_form_vs_monte_carlo() {
    let trials = scaled(100_000);
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    let mut seed_idx = 0u64;
    for n_t in [1u32, 2, 4] {
        let link = fig1_link(n_t);
        let model = OutageModel::new(&link, FIG1_ALPHA).unwrap();
        for lam_tx in density_span(&link, FIG1_ALPHA, 0.05, 0.9, 5) {
            let analytic = model.outage(lam_tx).unwrap();
            let net = NetworkParams::new(lam_tx, FIG1_ALPHA).unwrap();
            let est = simulate_outage(&link, &net, trials, 300 + seed_idx, 1e-3).unwrap();
            seed_idx += 1;
            let diff = (est.probability - analytic).abs();
            let gate = 3.0 * est.std_error;
            let point_ok = diff <= gate;
            ok &= point_ok;
            detail.push_str(&format!(
                "nt={n_t} lam={lam_tx:.3}: |{:.4}-{analytic:.4}|={diff:.1e}<={gate:.1e} {}; ",
                est.probability,
                if point_ok { "ok" } else { "FAIL" }
            ));
        }
    }
    detail.push_str(&format!("({trials} trials/point, {:?})", start.elapsed()));
    report("criterion-3 closed-form-vs-monte-carlo", ok, &detail);
}

#[test]
fn criterion_4_estimator_equivalence() {
    let trials = scaled(10_000);
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    let mut seed_idx = 0u64;
    for n_t in [1u32, 2, 4] {
        let link = fig1_link(n_t);
        for lam_tx in density_span(&link, FIG1_ALPHA, 0.05, 0.9, 5) {
            let net = NetworkParams::new(lam_tx, FIG1_ALPHA).unwrap();
            let full = simulate_outage(&link, &net, trials, 400 + seed_idx, 1e-3).unwrap();
            let semi =
                simulate_outage_semianalytic(&link, &net, trials, 800 + seed_idx, 1e-3).unwrap();
            seed_idx += 1;
            let combined = (full.std_error.powi(2) + semi.std_error.powi(2)).sqrt();
            let diff = (full.probability - semi.probability).abs();
            let agree = diff <= 3.0 * combined;
            let tighter = semi.std_error < full.std_error;
            ok &= agree && tighter;
            detail.push_str(&format!(
                "nt={n_t} lam={lam_tx:.3}: diff={diff:.1e}<={:.1e} se {:.1e}<{:.1e} {}; ",
                3.0 * combined,
                semi.std_error,
                full.std_error,
                if agree && tighter { "ok" } else { "FAIL" }
            ));
        }
    }
    detail.push_str(&format!(
        "({trials} realizations/point, {:?})",
        start.elapsed()
    ));
    report("criterion-4 estimator-equivalence", ok, &detail);
}

#[test]
fn criterion_5_single_stream_dominance() {
    let start = Instant::now();
    // outage ordering at equal per-stream density over the plotted range
    let models: Vec<(u32, OutageModel)> = [1u32, 2, 4]
        .iter()
        .map(|&n_t| (n_t, OutageModel::new(&fig1_link(n_t), FIG1_ALPHA).unwrap()))
        .collect();
    let mut outage_ok = true;
    let mut worst_margin = f64::INFINITY;
    for i in 0..20 {
        let lam_ps = 1e-3 * (1.0f64 / 1e-3).powf(i as f64 / 19.0);
        let f: Vec<f64> = models
            .iter()
            .map(|(n_t, m)| m.outage(lam_ps / *n_t as f64).unwrap())
            .collect();
        outage_ok &= f[0] <= f[1] && f[0] <= f[2];
        worst_margin = worst_margin.min((f[1] - f[0]).min(f[2] - f[0]));
    }
    // capacity ordering over the target-outage grid
    let mut capacity_ok = true;
    let mut worst_ratio = f64::INFINITY;
    for i in 0..20 {
        let eps = 1e-4 * (0.8f64 / 1e-4).powf(i as f64 / 19.0);
        let caps: Vec<f64> = [1u32, 2, 4]
            .iter()
            .map(|&n_t| {
                transmission_capacity_exact(&fig2_link(n_t), FIG2_ALPHA, eps)
                    .unwrap()
                    .exact_capacity
            })
            .collect();
        capacity_ok &= caps[0] > caps[1] && caps[0] > caps[2];
        worst_ratio = worst_ratio.min(caps[0] / caps[1].max(caps[2]));
    }
    let elapsed = start.elapsed();
    let ok = outage_ok && capacity_ok && elapsed.as_secs() < 30;
    report(
        "criterion-5 single-stream-dominance",
        ok,
        &format!(
            "outage ordering strict over 20 per-stream densities (min margin {worst_margin:.2e}); \
             capacity highest for single stream over 20 outage targets (min ratio {worst_ratio:.3}) \
             in {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_6_asymptotic_consistency() {
    let start = Instant::now();
    let mut detail = String::new();
    let mut ok = true;
    for n_t in [1u32, 2, 4] {
        let link = fig2_link(n_t);
        let ell = max_cancelable(4, n_t).unwrap() as f64;
        // least-squares slope of log lambda(eps) against log eps
        let n = 7usize;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let eps = 1e-6 * (1e-3f64 / 1e-6).powf(i as f64 / (n - 1) as f64);
            let lam = contention_density(&link, FIG2_ALPHA, eps).unwrap();
            let (x, y) = (eps.ln(), lam.ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let nf = n as f64;
        let slope = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
        let want = 1.0 / ell;
        let slope_ok = (slope - want).abs() <= 0.1 * want;

        let ratio_at = |eps: f64| {
            let exact = transmission_capacity_exact(&link, FIG2_ALPHA, eps)
                .unwrap()
                .exact_capacity;
            let asym = transmission_capacity_asymptotic(&link, FIG2_ALPHA, eps).unwrap();
            (exact / asym - 1.0).abs()
        };
        let near = ratio_at(1e-4);
        let far = ratio_at(1e-2);
        let converging = near < far;
        ok &= slope_ok && converging;
        detail.push_str(&format!(
            "nt={n_t}: slope={slope:.4} (want {want:.4}+-10%), |exact/asym-1| {near:.3e}@1e-4 < {far:.3e}@1e-2 {}; ",
            if slope_ok && converging { "ok" } else { "FAIL" }
        ));
    }
    detail.push_str(&format!("({:?})", start.elapsed()));
    report("criterion-6 asymptotic-consistency", ok, &detail);
}

#[test]
fn criterion_7_conditional_cdf_vs_channel_monte_carlo() {
    let draws = scaled(100_000);
    let start = Instant::now();
    let mut config_rng = trial_rng(0xC0FFEE, 0);
    let mut detail = String::new();
    let mut ok = true;
    let mut accepted = 0u32;
    let mut attempts = 0u32;
    while accepted < 20 {
        attempts += 1;
        assert!(
            attempts < 4000,
            "configuration sampling failed to land in the testable band"
        );
        let n_t = if accepted % 2 == 0 { 1 } else { 2 };
        let l = config_rng.gen_range(0usize..=5);
        let alpha = config_rng.gen_range(2.5..6.0);
        let gamma = if accepted % 5 == 4 {
            f64::INFINITY
        } else {
            100.0
        };
        let dists: Vec<f64> = (0..l).map(|_| config_rng.gen_range(0.5..3.5)).collect();
        let link = LinkConfig::new(n_t, 4, 1.0, gamma, 1.0).unwrap();
        let xs: Vec<f64> = dists.iter().map(|d| d.powf(alpha)).collect();
        let cond = conditional_outage(&link, alpha, &xs).unwrap();
        // keep points where a binomial comparison is informative
        if !(0.02..=0.98).contains(&cond) {
            continue;
        }
        let realization =
            PppRealization::new(4.0, dists.iter().map(|&d| [d, 0.0]).collect()).unwrap();
        let mut count = 0u64;
        for t in 0..draws {
            let mut rng = trial_rng(700 + accepted as u64, t);
            let s = mmse_sinr(&link, alpha, &realization, &mut rng, 1).unwrap();
            if s.sinr <= link.z {
                count += 1;
            }
        }
        let p = count as f64 / draws as f64;
        let se = (p * (1.0 - p) / draws as f64)
            .sqrt()
            .max((cond * (1.0 - cond) / draws as f64).sqrt());
        let diff = (p - cond).abs();
        let point_ok = diff <= 3.0 * se;
        ok &= point_ok;
        detail.push_str(&format!(
            "nt={n_t} L={l} a={alpha:.2}: |{p:.4}-{cond:.4}|={diff:.1e}<={:.1e} {}; ",
            3.0 * se,
            if point_ok { "ok" } else { "FAIL" }
        ));
        accepted += 1;
    }
    detail.push_str(&format!(
        "({draws} channel draws/config, {:?})",
        start.elapsed()
    ));
    report("criterion-7 conditional-cdf", ok, &detail);
}

#[test]
fn criterion_8_determinism_and_truncation() {
    let start = Instant::now();
    // byte-identical CSV across repeated runs and worker counts
    let argv = [
        "spatmux",
        "outage-curve",
        "--points",
        "3",
        "--sweep-min",
        "0.01",
        "--sweep-max",
        "0.09",
        "--trials",
        "3000",
        "--seed",
        "5",
    ];
    let baseline = render(&Cli::try_parse_from(argv).unwrap()).unwrap();
    let repeat = render(&Cli::try_parse_from(argv).unwrap()).unwrap();
    let mut identical = baseline == repeat;
    for threads in [1usize, 3] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let under_pool = pool.install(|| render(&Cli::try_parse_from(argv).unwrap()).unwrap());
        identical &= under_pool == baseline;
    }

    // truncation insensitivity at the reference point: couple the two disc
    // sizes through a shared point pattern so the measured change is the
    // truncation effect itself, not resampling noise
    let trials = scaled(100_000);
    let link = fig1_link(2);
    let lam_tx = 0.05;
    let net = NetworkParams::new(lam_tx, FIG1_ALPHA).unwrap();
    let r_near = truncation_radius(&net, &link, 1e-3).unwrap();
    let r_far = truncation_radius(&net, &link, 5e-4).unwrap();
    let analytic = outage_probability(&link, &net).unwrap();
    let sigma = (analytic * (1.0 - analytic) / trials as f64).sqrt();
    let mut bias_acc = 0.0f64;
    for t in 0..trials {
        let mut rng = trial_rng(0x7217C, t);
        let field = sample_ppp(&net, r_far, &mut rng);
        let mut xs_far = Vec::with_capacity(field.points().len());
        let mut xs_near = Vec::new();
        for p in field.points() {
            let r_sq = p[0] * p[0] + p[1] * p[1];
            let x = r_sq.powf(0.5 * FIG1_ALPHA);
            xs_far.push(x);
            if r_sq.sqrt() <= r_near {
                xs_near.push(x);
            }
        }
        let far = conditional_outage(&link, FIG1_ALPHA, &xs_far).unwrap();
        let near = conditional_outage(&link, FIG1_ALPHA, &xs_near).unwrap();
        bias_acc += far - near;
    }
    let bias = bias_acc / trials as f64;
    let trunc_ok = bias.abs() < sigma;

    let elapsed = start.elapsed();
    let ok = identical && trunc_ok;
    report(
        "criterion-8 determinism-and-truncation",
        ok,
        &format!(
            "CSV byte-identical across runs and 1/3-thread pools: {identical}; halving delta \
             (disc {r_near:.1} -> {r_far:.1}) shifts the estimate by {bias:.2e} < 1 sigma = \
             {sigma:.2e} at {trials} trials ({elapsed:?})"
        ),
    );
}
