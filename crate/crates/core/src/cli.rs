//! Command-line surface: figure sweeps as CSV, a validation suite, and
//! single-point queries.
//!
//! Defaults reproduce the reference configurations: `outage-curve` uses
//! n_r = 4, alpha = 4.6, z = 0 dB, gamma = 20 dB, d0 = 1;
//! `tc-vs-epsilon` uses alpha = 4.5, z = 10 dB at high SNR; `tc-vs-alpha`
//! uses z = 15 dB, epsilon = 1e-3 at high SNR. dB flags are converted to
//! linear exactly once here; the library is strictly linear-scale.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error,
//! 3 data/infeasibility error, 4 numerical error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::analytic::{
    contention_density, max_cancelable, omega, outage_probability, theta,
    transmission_capacity_exact, LinkConfig, NetworkParams, OutageModel,
};
use crate::error::Error;
use crate::montecarlo::{simulate_outage, simulate_outage_semianalytic, OutageEstimate};
use crate::numerics::log_gamma;
use crate::partitions::{enumerate_partitions, multiplicity_profile, partition_count};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 10^(dB/10).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// 10 log10(x).
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

// ---------------------------------------------------------------------
// Argument structure
// ---------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "spatmux",
    version,
    about = "Outage probability and transmission capacity of MIMO MMSE spatial \
             multiplexing links in Poisson ad hoc networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Outage probability vs density, analytic with optional Monte Carlo
    OutageCurve(OutageCurveArgs),
    /// Transmission capacity vs target outage probability
    TcVsEpsilon(TcVsEpsilonArgs),
    /// Transmission capacity vs path loss exponent
    TcVsAlpha(TcVsAlphaArgs),
    /// Cross-check the closed forms against oracles and the simulator
    Validate(ValidateArgs),
    /// All derived quantities at a single parameter point
    Point(PointArgs),
}

#[derive(Args, Debug, Clone)]
pub struct LinkArgs {
    /// Transmit antennas / data streams; repeat for multiple curves
    #[arg(long = "nt", value_name = "N")]
    pub nt: Vec<u32>,
    /// Receive antennas
    #[arg(long = "nr", value_name = "N")]
    pub nr: Option<u32>,
    /// SINR threshold, linear scale
    #[arg(long, value_name = "REAL", conflicts_with = "z_db")]
    pub z: Option<f64>,
    /// SINR threshold in dB
    #[arg(long = "z-db", value_name = "DB")]
    pub z_db: Option<f64>,
    /// Transmit SNR, linear scale; "inf" selects the high-SNR regime
    #[arg(long, value_name = "REAL|inf", conflicts_with = "gamma_db")]
    pub gamma: Option<f64>,
    /// Transmit SNR in dB
    #[arg(long = "gamma-db", value_name = "DB")]
    pub gamma_db: Option<f64>,
    /// Transmitter-receiver distance
    #[arg(long, value_name = "REAL")]
    pub d0: Option<f64>,
    /// Path loss exponent (> 2)
    #[arg(long, value_name = "REAL")]
    pub alpha: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct McArgs {
    /// Monte Carlo trials per point
    #[arg(long, value_name = "N", default_value_t = 100_000)]
    pub trials: u64,
    /// Base seed; trial t draws from substream (seed, t)
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    pub seed: u64,
    /// Far-field truncation tolerance of the simulation disc
    #[arg(long, value_name = "REAL", default_value_t = 1e-3)]
    pub delta: f64,
    /// Skip the Monte Carlo columns (analytic only)
    #[arg(long = "no-mc")]
    pub no_mc: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Sweep lower endpoint
    #[arg(long = "sweep-min", value_name = "REAL")]
    pub sweep_min: Option<f64>,
    /// Sweep upper endpoint
    #[arg(long = "sweep-max", value_name = "REAL")]
    pub sweep_max: Option<f64>,
    /// Number of grid points
    #[arg(long, value_name = "N")]
    pub points: Option<usize>,
    /// Log-spaced grid
    #[arg(long, conflicts_with = "linear")]
    pub log: bool,
    /// Linearly spaced grid
    #[arg(long)]
    pub linear: bool,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output path (default: standard output)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Write a companion gnuplot script next to --out
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Args, Debug)]
pub struct OutageCurveArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Sweep per-stream density: curve n_t is evaluated at transmitter
    /// density lambda / n_t, keeping the stream count per unit area fixed
    #[arg(
        long = "per-stream-density",
        value_name = "BOOL",
        default_value_t = true,
        default_missing_value = "true",
        num_args = 0..=1,
        action = ArgAction::Set
    )]
    pub per_stream_density: bool,
}

#[derive(Args, Debug)]
pub struct TcVsEpsilonArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TcVsAlphaArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    #[command(flatten)]
    pub sweep: SweepArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Target outage probability
    #[arg(long, value_name = "REAL", default_value_t = 1e-3)]
    pub epsilon: f64,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Transmitter density
    #[arg(long, value_name = "REAL", default_value_t = 0.01)]
    pub lambda: f64,
    /// Target outage probability for the capacity fields
    #[arg(long, value_name = "REAL", default_value_t = 1e-3)]
    pub epsilon: f64,
}

// ---------------------------------------------------------------------
// Failure mapping
// ---------------------------------------------------------------------

/// CLI failure classes carrying their process exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Invalid flags or parameter domains (exit 2).
    Usage(String),
    /// A validation gate failed (exit 1).
    Validation(String),
    /// Data or infeasibility problem (exit 3).
    Data(String),
    /// Numerical failure inside a computation (exit 4).
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Validation(_) => 1,
            Failure::Data(_) => 3,
            Failure::Numerical(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::Validation(m)
            | Failure::Data(m)
            | Failure::Numerical(m) => m,
        }
    }
}

fn core_err(e: Error) -> Failure {
    match e {
        Error::Domain(m) => Failure::Usage(m),
        Error::Bracket { .. } => Failure::Data(e.to_string()),
        Error::InfeasibleEpsilon { .. } => Failure::Data(e.to_string()),
        Error::Numerical(m) => Failure::Numerical(m),
        Error::Consistency(m) => Failure::Numerical(m),
    }
}

// ---------------------------------------------------------------------
// Default resolution
// ---------------------------------------------------------------------

struct LinkDefaults {
    nt: &'static [u32],
    nr: u32,
    z: f64,
    gamma: f64,
    d0: f64,
    alpha: f64,
}

const OUTAGE_DEFAULTS: LinkDefaults = LinkDefaults {
    nt: &[1, 2, 4],
    nr: 4,
    z: 1.0,       // 0 dB
    gamma: 100.0, // 20 dB
    d0: 1.0,
    alpha: 4.6,
};

const TC_EPSILON_DEFAULTS: LinkDefaults = LinkDefaults {
    nt: &[1, 2, 4],
    nr: 4,
    z: 10.0, // 10 dB
    gamma: f64::INFINITY,
    d0: 1.0,
    alpha: 4.5,
};

const TC_ALPHA_DEFAULTS: LinkDefaults = LinkDefaults {
    nt: &[1, 2, 4],
    nr: 4,
    z: 31.622776601683793, // 15 dB
    gamma: f64::INFINITY,
    d0: 1.0,
    alpha: f64::NAN, // swept
};

struct ResolvedLink {
    nts: Vec<u32>,
    nr: u32,
    z: f64,
    gamma: f64,
    d0: f64,
    alpha: f64,
}

impl ResolvedLink {
    fn config(&self, n_t: u32) -> Result<LinkConfig, Failure> {
        LinkConfig::new(n_t, self.nr, self.z, self.gamma, self.d0).map_err(core_err)
    }
}

fn resolve_link(args: &LinkArgs, d: &LinkDefaults) -> Result<ResolvedLink, Failure> {
    let nts = if args.nt.is_empty() {
        d.nt.to_vec()
    } else {
        args.nt.clone()
    };
    let nr = args.nr.unwrap_or(d.nr);
    let z = match (args.z, args.z_db) {
        (Some(v), _) => v,
        (None, Some(db)) => db_to_linear(db),
        (None, None) => d.z,
    };
    let gamma = match (args.gamma, args.gamma_db) {
        (Some(v), _) => v,
        (None, Some(db)) => db_to_linear(db),
        (None, None) => d.gamma,
    };
    let d0 = args.d0.unwrap_or(d.d0);
    let alpha = args.alpha.unwrap_or(d.alpha);
    if nts.is_empty() {
        return Err(Failure::Usage("at least one --nt is required".into()));
    }
    for &nt in &nts {
        // constructing the config validates all physical parameters
        LinkConfig::new(nt, nr, z, gamma, d0).map_err(core_err)?;
    }
    if !alpha.is_nan() && !(alpha > 2.0 && alpha.is_finite()) {
        return Err(Failure::Usage(format!(
            "path loss exponent must be finite and > 2, got {alpha}"
        )));
    }
    Ok(ResolvedLink {
        nts,
        nr,
        z,
        gamma,
        d0,
        alpha,
    })
}

fn check_mc(mc: &McArgs) -> Result<(), Failure> {
    if mc.trials < 1 {
        return Err(Failure::Usage("trials must be at least 1".into()));
    }
    if !(mc.delta > 0.0) || !mc.delta.is_finite() {
        return Err(Failure::Usage(format!(
            "delta must be finite and positive, got {}",
            mc.delta
        )));
    }
    Ok(())
}

struct SweepDefaults {
    min: f64,
    max: f64,
    points: usize,
    log: bool,
}

fn resolve_sweep(args: &SweepArgs, d: &SweepDefaults) -> Result<Vec<f64>, Failure> {
    let min = args.sweep_min.unwrap_or(d.min);
    let max = args.sweep_max.unwrap_or(d.max);
    let points = args.points.unwrap_or(d.points);
    let log = if args.log {
        true
    } else if args.linear {
        false
    } else {
        d.log
    };
    if points < 1 {
        return Err(Failure::Usage("sweep needs at least one point".into()));
    }
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(Failure::Usage(format!(
            "invalid sweep range [{min}, {max}]"
        )));
    }
    if log && !(min > 0.0) {
        return Err(Failure::Usage(format!(
            "log-spaced sweep requires a positive lower endpoint, got {min}"
        )));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let n = points as f64 - 1.0;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / n;
            if log {
                min * (max / min).powf(f)
            } else {
                min + (max - min) * f
            }
        })
        .collect())
}

// ---------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------

/// 17 significant digits, fixed scientific form; deterministic.
fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.16e}")
    }
}

fn gamma_label(gamma: f64) -> String {
    if gamma.is_finite() {
        format!("{gamma}")
    } else {
        "inf".into()
    }
}

fn nts_label(nts: &[u32]) -> String {
    nts.iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

struct CommandOutput {
    text: String,
    gnuplot: Option<String>,
    all_passed: Option<bool>,
}

// ---------------------------------------------------------------------
// outage-curve
// ---------------------------------------------------------------------

fn run_outage_curve(args: &OutageCurveArgs) -> Result<CommandOutput, Failure> {
    let link = resolve_link(&args.link, &OUTAGE_DEFAULTS)?;
    check_mc(&args.mc)?;
    let grid = resolve_sweep(
        &args.sweep,
        &SweepDefaults {
            min: 1e-3,
            max: 1.0,
            points: 20,
            log: true,
        },
    )?;
    for &lam in &grid {
        if !(lam >= 0.0) {
            return Err(Failure::Usage(format!(
                "density {lam} must be non-negative"
            )));
        }
    }

    let mut text = format!(
        "# spatmux {TOOL_VERSION} outage-curve nr={} z={} gamma={} d0={} alpha={} nt={} \
         per-stream-density={} trials={} seed={} delta={} no-mc={} points={}\n",
        link.nr,
        link.z,
        gamma_label(link.gamma),
        link.d0,
        link.alpha,
        nts_label(&link.nts),
        args.per_stream_density,
        args.mc.trials,
        args.mc.seed,
        args.mc.delta,
        args.mc.no_mc,
        grid.len(),
    );
    if args.mc.no_mc {
        text.push_str("lambda,n_t,analytic_outage\n");
    } else {
        text.push_str("lambda,n_t,analytic_outage,mc_outage,mc_std_error\n");
    }

    for (curve_idx, &nt) in link.nts.iter().enumerate() {
        let cfg = link.config(nt)?;
        let model = OutageModel::new(&cfg, link.alpha).map_err(core_err)?;
        for (i, &lam) in grid.iter().enumerate() {
            let lam_tx = if args.per_stream_density {
                lam / nt as f64
            } else {
                lam
            };
            let analytic = model.outage(lam_tx).map_err(core_err)?;
            if args.mc.no_mc {
                let _ = writeln!(text, "{},{nt},{}", fmt(lam), fmt(analytic));
            } else {
                let net = NetworkParams::new(lam_tx, link.alpha).map_err(core_err)?;
                let point_seed = args.mc.seed.wrapping_add(
                    ((curve_idx * grid.len() + i) as u64).wrapping_mul(0x9E3779B97F4A7C15),
                );
                let est = simulate_outage(&cfg, &net, args.mc.trials, point_seed, args.mc.delta)
                    .map_err(core_err)?;
                let _ = writeln!(
                    text,
                    "{},{nt},{},{},{}",
                    fmt(lam),
                    fmt(analytic),
                    fmt(est.probability),
                    fmt(est.std_error)
                );
            }
        }
    }

    let gnuplot = gnuplot_script(
        &args.output,
        &link.nts,
        "density",
        "outage probability",
        true,
        true,
        &[("analytic", 3), ("monte-carlo", 4)],
        args.mc.no_mc,
    )?;
    Ok(CommandOutput {
        text,
        gnuplot,
        all_passed: None,
    })
}

// ---------------------------------------------------------------------
// tc-vs-epsilon
// ---------------------------------------------------------------------

fn run_tc_vs_epsilon(args: &TcVsEpsilonArgs) -> Result<CommandOutput, Failure> {
    let link = resolve_link(&args.link, &TC_EPSILON_DEFAULTS)?;
    let grid = resolve_sweep(
        &args.sweep,
        &SweepDefaults {
            min: 1e-4,
            max: 0.8,
            points: 20,
            log: true,
        },
    )?;
    for &eps in &grid {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Failure::Usage(format!(
                "outage sweep values must lie in (0, 1), got {eps}"
            )));
        }
    }

    let mut text = format!(
        "# spatmux {TOOL_VERSION} tc-vs-epsilon nr={} z={} gamma={} d0={} alpha={} nt={} points={}\n",
        link.nr,
        link.z,
        gamma_label(link.gamma),
        link.d0,
        link.alpha,
        nts_label(&link.nts),
        grid.len(),
    );
    text.push_str("epsilon,n_t,feasible,exact_capacity,asymptotic_capacity\n");

    let mut feasible_rows = 0usize;
    for &nt in &link.nts {
        let cfg = link.config(nt)?;
        for &eps in &grid {
            match transmission_capacity_exact(&cfg, link.alpha, eps) {
                Ok(res) => {
                    feasible_rows += 1;
                    let _ = writeln!(
                        text,
                        "{},{nt},1,{},{}",
                        fmt(eps),
                        fmt(res.exact_capacity),
                        fmt(res.asymptotic_capacity)
                    );
                }
                Err(Error::InfeasibleEpsilon { .. }) | Err(Error::Bracket { .. }) => {
                    let _ = writeln!(text, "{},{nt},0,nan,nan", fmt(eps));
                }
                Err(e) => return Err(core_err(e)),
            }
        }
    }
    if feasible_rows == 0 {
        return Err(Failure::Data(
            "every sweep point is infeasible at this configuration".into(),
        ));
    }

    let gnuplot = gnuplot_script(
        &args.output,
        &link.nts,
        "target outage probability",
        "transmission capacity",
        true,
        true,
        &[("exact", 4), ("asymptotic", 5)],
        false,
    )?;
    Ok(CommandOutput {
        text,
        gnuplot,
        all_passed: None,
    })
}

// ---------------------------------------------------------------------
// tc-vs-alpha
// ---------------------------------------------------------------------

fn run_tc_vs_alpha(args: &TcVsAlphaArgs) -> Result<CommandOutput, Failure> {
    if args.link.alpha.is_some() {
        return Err(Failure::Usage(
            "tc-vs-alpha sweeps the path loss exponent; use --sweep-min/--sweep-max instead of --alpha"
                .into(),
        ));
    }
    let link = resolve_link(&args.link, &TC_ALPHA_DEFAULTS)?;
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        return Err(Failure::Usage(format!(
            "epsilon must lie in (0, 1), got {}",
            args.epsilon
        )));
    }
    let grid = resolve_sweep(
        &args.sweep,
        &SweepDefaults {
            min: 2.5,
            max: 6.0,
            points: 15,
            log: false,
        },
    )?;
    for &alpha in &grid {
        if !(alpha > 2.0) {
            return Err(Failure::Usage(format!(
                "every path loss exponent in the sweep must exceed 2, got {alpha}"
            )));
        }
    }

    let mut rows: Vec<(f64, u32, f64)> = Vec::new();
    let mut feasible_rows = 0usize;
    for &nt in &link.nts {
        let cfg = link.config(nt)?;
        for &alpha in &grid {
            match transmission_capacity_exact(&cfg, alpha, args.epsilon) {
                Ok(res) => {
                    feasible_rows += 1;
                    rows.push((alpha, nt, res.exact_capacity));
                }
                Err(Error::InfeasibleEpsilon { .. }) | Err(Error::Bracket { .. }) => {
                    rows.push((alpha, nt, f64::NAN));
                }
                Err(e) => return Err(core_err(e)),
            }
        }
    }
    if feasible_rows == 0 {
        return Err(Failure::Data(
            "every sweep point is infeasible at this configuration".into(),
        ));
    }

    let mut text = format!(
        "# spatmux {TOOL_VERSION} tc-vs-alpha nr={} z={} gamma={} d0={} epsilon={} nt={} points={}\n",
        link.nr,
        link.z,
        gamma_label(link.gamma),
        link.d0,
        args.epsilon,
        nts_label(&link.nts),
        grid.len(),
    );
    // capacity is expected to grow with the path loss exponent; report,
    // do not enforce
    for &nt in &link.nts {
        let vals: Vec<f64> = rows
            .iter()
            .filter(|r| r.1 == nt)
            .map(|r| r.2)
            .filter(|v| !v.is_nan())
            .collect();
        let increasing = vals.windows(2).all(|w| w[1] >= w[0]);
        let _ = writeln!(text, "# monotone_increasing_in_alpha nt={nt}: {increasing}");
    }
    text.push_str("alpha,n_t,exact_capacity\n");
    for (alpha, nt, cap) in rows {
        let _ = writeln!(text, "{},{nt},{}", fmt(alpha), fmt(cap));
    }

    let gnuplot = gnuplot_script(
        &args.output,
        &link.nts,
        "path loss exponent",
        "transmission capacity",
        false,
        true,
        &[("exact", 3)],
        false,
    )?;
    Ok(CommandOutput {
        text,
        gnuplot,
        all_passed: None,
    })
}

// ---------------------------------------------------------------------
// point
// ---------------------------------------------------------------------

fn run_point(args: &PointArgs) -> Result<CommandOutput, Failure> {
    let defaults = LinkDefaults {
        nt: &[1],
        ..OUTAGE_DEFAULTS
    };
    let link = resolve_link(&args.link, &defaults)?;
    check_mc(&args.mc)?;
    if link.nts.len() != 1 {
        return Err(Failure::Usage("point takes exactly one --nt".into()));
    }
    if !(args.lambda >= 0.0) || !args.lambda.is_finite() {
        return Err(Failure::Usage(format!(
            "lambda must be finite and non-negative, got {}",
            args.lambda
        )));
    }
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        return Err(Failure::Usage(format!(
            "epsilon must lie in (0, 1), got {}",
            args.epsilon
        )));
    }
    let nt = link.nts[0];
    let cfg = link.config(nt)?;
    let net = NetworkParams::new(args.lambda, link.alpha).map_err(core_err)?;

    let analytic = outage_probability(&cfg, &net).map_err(core_err)?;
    let th = theta(&cfg, link.alpha).map_err(core_err)?;
    let ell = max_cancelable(link.nr, nt).map_err(core_err)?;
    let om = omega(&cfg, link.alpha).map_err(core_err)?;
    // capacity fields only exist for a positive rate
    let (lam_eps, cap_exact, cap_asym) = if link.z > 0.0 {
        let res = transmission_capacity_exact(&cfg, link.alpha, args.epsilon).map_err(core_err)?;
        (
            res.contention_density,
            res.exact_capacity,
            res.asymptotic_capacity,
        )
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    let mc = if args.mc.no_mc {
        None
    } else {
        Some(
            simulate_outage(&cfg, &net, args.mc.trials, args.mc.seed, args.mc.delta)
                .map_err(core_err)?,
        )
    };

    let mut text = format!(
        "# spatmux {TOOL_VERSION} point nt={nt} nr={} z={} gamma={} d0={} alpha={} lambda={} \
         epsilon={} trials={} seed={} delta={} no-mc={}\n",
        link.nr,
        link.z,
        gamma_label(link.gamma),
        link.d0,
        link.alpha,
        args.lambda,
        args.epsilon,
        args.mc.trials,
        args.mc.seed,
        args.mc.delta,
        args.mc.no_mc,
    );
    text.push_str(
        "n_t,n_r,z,gamma,d0,alpha,lambda,epsilon,analytic_outage,mc_outage,mc_std_error,ell,theta,omega,contention_density,exact_capacity,asymptotic_capacity\n",
    );
    let (mc_p, mc_se) = match mc {
        Some(OutageEstimate {
            probability,
            std_error,
            ..
        }) => (fmt(probability), fmt(std_error)),
        None => ("nan".into(), "nan".into()),
    };
    let _ = writeln!(
        text,
        "{nt},{},{},{},{},{},{},{},{},{mc_p},{mc_se},{ell},{},{},{},{},{}",
        link.nr,
        fmt(link.z),
        if link.gamma.is_finite() {
            fmt(link.gamma)
        } else {
            "inf".into()
        },
        fmt(link.d0),
        fmt(link.alpha),
        fmt(args.lambda),
        fmt(args.epsilon),
        fmt(analytic),
        fmt(th),
        fmt(om),
        fmt(lam_eps),
        fmt(cap_exact),
        fmt(cap_asym),
    );

    if args.output.gnuplot {
        return Err(Failure::Usage(
            "--gnuplot applies to sweep commands only".into(),
        ));
    }
    Ok(CommandOutput {
        text,
        gnuplot: None,
        all_passed: None,
    })
}

// ---------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(list: &mut Vec<Check>, name: &'static str, passed: bool, detail: String) {
    list.push(Check {
        name,
        passed,
        detail,
    });
}

fn run_validate(args: &ValidateArgs) -> Result<CommandOutput, Failure> {
    check_mc(&args.mc)?;
    if args.output.gnuplot {
        return Err(Failure::Usage(
            "--gnuplot applies to sweep commands only".into(),
        ));
    }
    let trials = args.mc.trials;
    let seed = args.mc.seed;
    let delta = args.mc.delta;
    let mut checks: Vec<Check> = Vec::new();

    // --- partition oracles -------------------------------------------
    {
        let parts = enumerate_partitions(4);
        let expected: Vec<Vec<u32>> = vec![
            vec![4],
            vec![3, 1],
            vec![2, 2],
            vec![2, 1, 1],
            vec![1, 1, 1, 1],
        ];
        let got: Vec<Vec<u32>> = parts.iter().map(|p| p.summands().to_vec()).collect();
        let indices_ok = got == expected
            && parts[2].summands()[1] == 2
            && parts[3].summands()[1] == 1
            && multiplicity_profile(&parts[2]).entries() == [(2, 2)]
            && multiplicity_profile(&parts[4]).entries() == [(1, 4)];
        check(
            &mut checks,
            "partition-worked-examples",
            indices_ok,
            format!("enumeration of 4 -> {got:?}"),
        );

        let mut table = vec![0u64; 21];
        table[0] = 1;
        for m in 1..=20 {
            for j in m..=20 {
                table[j] += table[j - m];
            }
        }
        let counts_ok = (0..=20u32).all(|k| partition_count(k) == table[k as usize]);
        check(
            &mut checks,
            "partition-count-oracle",
            counts_ok,
            format!(
                "p(k) matches the generating-function table for k <= 20 (p(20) = {})",
                table[20]
            ),
        );
    }

    // --- log-gamma recurrence -----------------------------------------
    {
        let mut worst = 0.0f64;
        let mut x = 1e-3;
        while x < 150.0 {
            let lhs = log_gamma(x + 1.0).map_err(core_err)?;
            let rhs = log_gamma(x).map_err(core_err)? + x.ln();
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
            x *= 1.31;
        }
        check(
            &mut checks,
            "log-gamma-recurrence",
            worst <= 1e-12,
            format!("max relative defect {worst:.2e} (bound 1e-12)"),
        );
    }

    // --- theta reference ----------------------------------------------
    {
        let cfg = LinkConfig::new(1, 1, 1.0, 100.0, 1.0).map_err(core_err)?;
        let got = theta(&cfg, 4.0).map_err(core_err)?;
        let want = std::f64::consts::PI * std::f64::consts::PI / 2.0;
        let err = (got - want).abs() / want;
        check(
            &mut checks,
            "theta-reference",
            err <= 1e-13,
            format!("theta = {got:.15} vs pi^2/2 (rel err {err:.2e})"),
        );
    }

    // --- collapse identities --------------------------------------------
    {
        use rand::Rng;
        let mut rng = crate::numerics::trial_rng(0xC0117A55, 0);
        let mut worst_siso = 0.0f64;
        let mut worst_noise = 0.0f64;
        for _ in 0..100 {
            let z = 10f64.powf(rng.gen_range(-2.0..2.0));
            let d0: f64 = rng.gen_range(0.3..3.0);
            let alpha = rng.gen_range(2.1..6.0);
            let gamma = 10f64.powf(rng.gen_range(0.0..3.0));
            let lambda = rng.gen_range(0.0..1.0);
            let cfg = LinkConfig::new(1, 1, z, gamma, d0).map_err(core_err)?;
            let th = theta(&cfg, alpha).map_err(core_err)?;
            let closed = 1.0 - (-(z * d0.powf(alpha) / gamma + th * lambda)).exp();
            let got =
                outage_probability(&cfg, &NetworkParams::new(lambda, alpha).map_err(core_err)?)
                    .map_err(core_err)?;
            worst_siso = worst_siso.max((got - closed).abs());

            let n_r = rng.gen_range(1..=8u32);
            let cfg = LinkConfig::new(1, n_r, z, gamma, d0).map_err(core_err)?;
            let c = z * d0.powf(alpha) / gamma;
            let mut series = 0.0;
            let mut term = 1.0;
            for p in 0..n_r {
                series += term;
                term *= c / (p as f64 + 1.0);
            }
            let closed = 1.0 - (-c).exp() * series;
            let got = outage_probability(&cfg, &NetworkParams::new(0.0, alpha).map_err(core_err)?)
                .map_err(core_err)?;
            worst_noise = worst_noise.max((got - closed).abs());
        }
        check(
            &mut checks,
            "collapse-single-antenna",
            worst_siso <= 1e-12,
            format!("max |general - exponential form| = {worst_siso:.2e} over 100 random points"),
        );
        check(
            &mut checks,
            "collapse-noise-only",
            worst_noise <= 1e-12,
            format!("max |general - gamma CDF| = {worst_noise:.2e} over 100 random points"),
        );
    }

    // --- omega vs small-epsilon inversion -------------------------------
    {
        let mut detail = String::new();
        let mut ok = true;
        for (n_t, n_r) in [(1u32, 4u32), (2, 4), (4, 4)] {
            let cfg = LinkConfig::new(n_t, n_r, 10.0, f64::INFINITY, 1.0).map_err(core_err)?;
            let alpha = 4.5;
            let ell = max_cancelable(n_r, n_t).map_err(core_err)?;
            let th = theta(&cfg, alpha).map_err(core_err)?;
            let eps = 1e-10;
            let lam = contention_density(&cfg, alpha, eps).map_err(core_err)?;
            let est = eps / (th * lam).powi(ell as i32);
            let want = omega(&cfg, alpha).map_err(core_err)?;
            let rel = (est / want - 1.0).abs();
            ok &= rel <= 0.02;
            let _ = write!(detail, "nt={n_t}: {rel:.1e}; ");
        }
        check(
            &mut checks,
            "omega-small-epsilon-inversion",
            ok,
            format!("relative gap of inverted leading coefficient: {detail}(bound 2e-2)"),
        );
    }

    // --- contention density round trip ----------------------------------
    {
        let mut worst = 0.0f64;
        for (n_t, gamma) in [(1u32, 100.0), (2, f64::INFINITY), (4, 100.0)] {
            let cfg = LinkConfig::new(n_t, 4, 1.0, gamma, 1.0).map_err(core_err)?;
            let model = OutageModel::new(&cfg, 4.6).map_err(core_err)?;
            for eps in [0.01, 0.1, 0.5, 0.9] {
                let lam = contention_density(&cfg, 4.6, eps).map_err(core_err)?;
                let back = model.outage(lam).map_err(core_err)?;
                worst = worst.max((back - eps).abs());
            }
        }
        check(
            &mut checks,
            "contention-density-round-trip",
            worst <= 1e-9,
            format!("max |F(lambda(eps)) - eps| = {worst:.2e} (bound 1e-9)"),
        );
    }

    // --- Monte Carlo vs analytic ----------------------------------------
    {
        let mut detail = String::new();
        let mut ok = true;
        for nt in [1u32, 2, 4] {
            let cfg = LinkConfig::new(nt, 4, 1.0, 100.0, 1.0).map_err(core_err)?;
            for lam_ps in [0.005, 0.02, 0.08] {
                let lam_tx = lam_ps / nt as f64;
                let net = NetworkParams::new(lam_tx, 4.6).map_err(core_err)?;
                let analytic = outage_probability(&cfg, &net).map_err(core_err)?;
                let est = simulate_outage(&cfg, &net, trials, seed, delta).map_err(core_err)?;
                // gate on the larger of the empirical and the
                // analytic-rate binomial error so near-zero counts at tiny
                // trial numbers stay meaningful
                let sigma = est
                    .std_error
                    .max((analytic * (1.0 - analytic) / trials as f64).sqrt());
                let diff = (est.probability - analytic).abs();
                let this_ok = diff <= 3.0 * sigma;
                ok &= this_ok;
                let _ = write!(
                    detail,
                    "nt={nt} lam={lam_ps}: d={diff:.1e} 3s={:.1e}; ",
                    3.0 * sigma
                );
            }
        }
        check(&mut checks, "monte-carlo-vs-analytic", ok, detail);
    }

    // --- estimator cross-check -------------------------------------------
    {
        let n_semi = trials.min(20_000);
        let cfg = LinkConfig::new(2, 4, 1.0, 100.0, 1.0).map_err(core_err)?;
        let net = NetworkParams::new(0.04, 4.6).map_err(core_err)?;
        let analytic = outage_probability(&cfg, &net).map_err(core_err)?;
        let full = simulate_outage(&cfg, &net, n_semi, seed, delta).map_err(core_err)?;
        let semi = simulate_outage_semianalytic(&cfg, &net, n_semi, seed.wrapping_add(1), delta)
            .map_err(core_err)?;
        let combined = (full.std_error.powi(2) + semi.std_error.powi(2))
            .sqrt()
            .max(1e-12);
        let agree = (full.probability - semi.probability).abs() <= 3.0 * combined;
        let semi_close = (semi.probability - analytic).abs()
            <= 3.0
                * semi
                    .std_error
                    .max((analytic * (1.0 - analytic) / n_semi as f64).sqrt());
        let degenerate = full.probability == 0.0 || full.probability == 1.0;
        let variance_reduced = degenerate || semi.std_error < full.std_error;
        check(
            &mut checks,
            "estimator-cross-check",
            agree && semi_close && variance_reduced,
            format!(
                "full={:.4e} semi={:.4e} analytic={:.4e} se_full={:.1e} se_semi={:.1e} (n={n_semi})",
                full.probability, semi.probability, analytic, full.std_error, semi.std_error
            ),
        );
    }

    // --- per-stream symmetry ----------------------------------------------
    {
        let cfg = LinkConfig::new(2, 4, 1.0, 100.0, 1.0).map_err(core_err)?;
        let net = NetworkParams::new(0.02, 4.6).map_err(core_err)?;
        let s1 = crate::montecarlo::simulate_outage_stream(&cfg, &net, trials, seed, delta, 1)
            .map_err(core_err)?;
        let s2 = crate::montecarlo::simulate_outage_stream(&cfg, &net, trials, seed, delta, 2)
            .map_err(core_err)?;
        let combined = (s1.std_error.powi(2) + s2.std_error.powi(2))
            .sqrt()
            .max(1e-12);
        let diff = (s1.probability - s2.probability).abs();
        check(
            &mut checks,
            "per-stream-symmetry",
            diff <= 3.0 * combined,
            format!(
                "stream1={:.4e} stream2={:.4e} diff={diff:.1e} 3s={:.1e}",
                s1.probability,
                s2.probability,
                3.0 * combined
            ),
        );
    }

    // --- determinism -------------------------------------------------------
    {
        let cfg = LinkConfig::new(2, 4, 1.0, 100.0, 1.0).map_err(core_err)?;
        let net = NetworkParams::new(0.02, 4.6).map_err(core_err)?;
        let n = trials.min(2_000);
        let a = simulate_outage(&cfg, &net, n, seed, delta).map_err(core_err)?;
        let b = simulate_outage(&cfg, &net, n, seed, delta).map_err(core_err)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Failure::Numerical(e.to_string()))?;
        let c = pool
            .install(|| simulate_outage(&cfg, &net, n, seed, delta))
            .map_err(core_err)?;
        let identical = a.probability.to_bits() == b.probability.to_bits()
            && a.probability.to_bits() == c.probability.to_bits();
        check(
            &mut checks,
            "determinism-across-workers",
            identical,
            format!(
                "estimate {:.6e} reproduced across repeats and pool sizes",
                a.probability
            ),
        );
    }

    let mut text =
        format!("# spatmux {TOOL_VERSION} validate trials={trials} seed={seed} delta={delta}\n");
    let mut passed = 0usize;
    for c in &checks {
        let _ = writeln!(
            text,
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        if c.passed {
            passed += 1;
        }
    }
    let all = passed == checks.len();
    let _ = writeln!(text, "RESULT: {passed}/{} checks passed", checks.len());
    Ok(CommandOutput {
        text,
        gnuplot: None,
        all_passed: Some(all),
    })
}

// ---------------------------------------------------------------------
// gnuplot companion script
// ---------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn gnuplot_script(
    output: &OutputArgs,
    nts: &[u32],
    xlabel: &str,
    ylabel: &str,
    logx: bool,
    logy: bool,
    series: &[(&str, usize)],
    no_mc: bool,
) -> Result<Option<String>, Failure> {
    if !output.gnuplot {
        return Ok(None);
    }
    let Some(out) = &output.out else {
        return Err(Failure::Usage("--gnuplot requires --out".into()));
    };
    let csv = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| out.to_string_lossy().into_owned());
    let mut s = String::new();
    let _ = writeln!(s, "# companion plot for {csv}");
    let _ = writeln!(s, "set datafile separator ','");
    if logx {
        let _ = writeln!(s, "set logscale x 10");
    }
    if logy {
        let _ = writeln!(s, "set logscale y 10");
    }
    let _ = writeln!(s, "set xlabel '{xlabel}'");
    let _ = writeln!(s, "set ylabel '{ylabel}'");
    let _ = writeln!(s, "set key bottom right");
    let mut plots: Vec<String> = Vec::new();
    for &nt in nts {
        for (label, col) in series {
            if no_mc && *label != "analytic" {
                continue;
            }
            plots.push(format!(
                "'{csv}' using 1:($2=={nt}?${col}:1/0) with linespoints title 'nt={nt} {label}'"
            ));
        }
    }
    let _ = writeln!(s, "plot \\\n  {}", plots.join(", \\\n  "));
    let _ = writeln!(s, "pause -1 'press enter to close'");
    Ok(Some(s))
}

// ---------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------

fn write_output(out: &CommandOutput, args_out: &Option<PathBuf>) -> Result<(), Failure> {
    match args_out {
        None => {
            print!("{}", out.text);
        }
        Some(path) => {
            std::fs::write(path, &out.text)
                .map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))?;
            if let Some(script) = &out.gnuplot {
                let gp = path.with_extension("gp");
                std::fs::write(&gp, script)
                    .map_err(|e| Failure::Data(format!("cannot write {}: {e}", gp.display())))?;
            }
        }
    }
    Ok(())
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::OutageCurve(a) => &a.output,
        Command::TcVsEpsilon(a) => &a.output,
        Command::TcVsAlpha(a) => &a.output,
        Command::Validate(a) => &a.output,
        Command::Point(a) => &a.output,
    }
}

/// Run a parsed command and render its output; the text goes to `--out`
/// or stdout. Returns the validation status failure when a validate gate
/// fails.
pub fn execute(cli: &Cli) -> Result<(), Failure> {
    let rendered = match &cli.command {
        Command::OutageCurve(a) => run_outage_curve(a)?,
        Command::TcVsEpsilon(a) => run_tc_vs_epsilon(a)?,
        Command::TcVsAlpha(a) => run_tc_vs_alpha(a)?,
        Command::Validate(a) => run_validate(a)?,
        Command::Point(a) => run_point(a)?,
    };
    write_output(&rendered, &output_args(&cli.command).out)?;
    if rendered.all_passed == Some(false) {
        return Err(Failure::Validation("validation checks failed".into()));
    }
    Ok(())
}

/// Render a command to its output text without touching the filesystem;
/// used by tests that assert byte-level determinism.
pub fn render(cli: &Cli) -> Result<String, Failure> {
    let rendered = match &cli.command {
        Command::OutageCurve(a) => run_outage_curve(a)?,
        Command::TcVsEpsilon(a) => run_tc_vs_epsilon(a)?,
        Command::TcVsAlpha(a) => run_tc_vs_alpha(a)?,
        Command::Validate(a) => run_validate(a)?,
        Command::Point(a) => run_point(a)?,
    };
    Ok(rendered.text)
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
