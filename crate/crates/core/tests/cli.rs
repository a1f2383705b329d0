//! Integration tests of the command-line surface: exit codes, CSV schema,
//! byte-level determinism, and the dB boundary conversion.

use std::process::{Command, Output};
use std::time::Instant;

use spatmux::cli::{db_to_linear, linear_to_db};

fn spatmux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spatmux"))
        .args(args)
        .output()
        .expect("failed to launch binary")
}

fn stdout_of(args: &[&str]) -> String {
    let out = spatmux(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn exit_code(args: &[&str]) -> i32 {
    spatmux(args).status.code().expect("no exit code")
}

#[test]
fn help_lists_all_commands() {
    let text = stdout_of(&["--help"]);
    for cmd in [
        "outage-curve",
        "tc-vs-epsilon",
        "tc-vs-alpha",
        "validate",
        "point",
    ] {
        assert!(text.contains(cmd), "help misses {cmd}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(exit_code(&["outage-curve", "--alpha", "1.9", "--no-mc"]), 2);
    assert_eq!(exit_code(&["point", "--z", "1", "--z-db", "0"]), 2);
    assert_eq!(
        exit_code(&["point", "--gamma", "100", "--gamma-db", "20"]),
        2
    );
    assert_eq!(exit_code(&["outage-curve", "--gnuplot", "--no-mc"]), 2);
    assert_eq!(exit_code(&["tc-vs-alpha", "--alpha", "4.0"]), 2);
    assert_eq!(exit_code(&["validate", "--delta", "-0.5"]), 2);
    assert_eq!(exit_code(&["outage-curve", "--points", "0", "--no-mc"]), 2);
    assert_eq!(exit_code(&["no-such-command"]), 2);
    assert_eq!(
        exit_code(&["point", "--nt", "4", "--nr", "2", "--no-mc"]),
        2
    );
}

#[test]
fn infeasible_sweep_exits_3() {
    // finite SNR puts a noise floor above these targets
    let code = exit_code(&[
        "tc-vs-epsilon",
        "--gamma",
        "2",
        "--sweep-min",
        "1e-12",
        "--sweep-max",
        "1e-11",
        "--points",
        "3",
    ]);
    assert_eq!(code, 3);
}

#[test]
fn figure_commands_run_fast_without_monte_carlo() {
    for args in [
        vec!["outage-curve", "--no-mc"],
        vec!["tc-vs-epsilon"],
        vec!["tc-vs-alpha"],
    ] {
        let start = Instant::now();
        let text = stdout_of(&args);
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs_f64() < 1.0,
            "{args:?} took {elapsed:?}, expected < 1 s"
        );
        assert!(text.starts_with("# spatmux"), "missing parameter comment");
    }
}

#[test]
fn outage_curve_schema_and_per_stream_division() {
    let text = stdout_of(&[
        "outage-curve",
        "--no-mc",
        "--points",
        "2",
        "--sweep-min",
        "0.1",
        "--sweep-max",
        "0.4",
    ]);
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.contains("per-stream-density=true"));
    assert_eq!(lines.next().unwrap(), "lambda,n_t,analytic_outage");
    // row: per-stream density 0.1, curve nt=2 evaluated at 0.05
    let row = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| {
            let parts: Vec<&str> = l.split(',').collect();
            if parts.len() == 3 && parts[1] == "2" {
                Some((parts[0].parse::<f64>().ok()?, parts[2].parse::<f64>().ok()?))
            } else {
                None
            }
        })
        .next()
        .expect("no nt=2 row found");
    let link = spatmux::analytic::LinkConfig::new(2, 4, 1.0, 100.0, 1.0).unwrap();
    let net = spatmux::analytic::NetworkParams::new(row.0 / 2.0, 4.6).unwrap();
    let want = spatmux::analytic::outage_probability(&link, &net).unwrap();
    assert!((row.1 - want).abs() <= 1e-15 * want.max(1e-300));

    // total-density mode: the nt=2 curve is evaluated at lambda itself
    let text = stdout_of(&[
        "outage-curve",
        "--no-mc",
        "--per-stream-density",
        "false",
        "--points",
        "1",
        "--sweep-min",
        "0.1",
        "--sweep-max",
        "0.1",
    ]);
    let row = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| {
            let parts: Vec<&str> = l.split(',').collect();
            if parts.len() == 3 && parts[1] == "2" {
                parts[2].parse::<f64>().ok()
            } else {
                None
            }
        })
        .next()
        .expect("no nt=2 row found");
    let net_total = spatmux::analytic::NetworkParams::new(0.1, 4.6).unwrap();
    let want_total = spatmux::analytic::outage_probability(&link, &net_total).unwrap();
    assert!((row - want_total).abs() <= 1e-15 * want_total);
}

#[test]
fn tc_schemas() {
    let text = stdout_of(&["tc-vs-epsilon", "--points", "3"]);
    assert!(text
        .lines()
        .any(|l| l == "epsilon,n_t,feasible,exact_capacity,asymptotic_capacity"));
    let text = stdout_of(&["tc-vs-alpha", "--points", "3"]);
    assert!(text.lines().any(|l| l == "alpha,n_t,exact_capacity"));
    // the monotonicity report is present and affirms the expected trend
    for nt in [1, 2, 4] {
        assert!(
            text.contains(&format!("# monotone_increasing_in_alpha nt={nt}: true")),
            "missing monotonicity report for nt={nt} in\n{text}"
        );
    }
}

#[test]
fn point_emits_single_record_and_zero_threshold_short_circuits() {
    let text = stdout_of(&["point", "--nt", "1", "--lambda", "0.02", "--no-mc"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "comment + header + one row");
    assert!(lines[1].starts_with("n_t,n_r,z,gamma,d0,alpha,lambda,epsilon,analytic_outage"));

    let text = stdout_of(&["point", "--nt", "1", "--z", "0", "--no-mc"]);
    let row: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    let outage: f64 = row[8].parse().unwrap();
    assert_eq!(outage, 0.0);
}

#[test]
fn output_files_are_byte_identical_across_runs() {
    let dir = std::env::temp_dir().join(format!("spatmux-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    let args = |path: &std::path::Path| {
        vec![
            "outage-curve".to_string(),
            "--points".into(),
            "2".into(),
            "--sweep-min".into(),
            "0.02".into(),
            "--sweep-max".into(),
            "0.08".into(),
            "--trials".into(),
            "1500".into(),
            "--seed".into(),
            "9".into(),
            "--out".into(),
            path.display().to_string(),
        ]
    };
    for path in [&a, &b] {
        let argv: Vec<String> = args(path);
        let argv_ref: Vec<&str> = argv.iter().map(|s| s.as_str()).collect();
        let out = spatmux(&argv_ref);
        assert!(out.status.success());
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same flags and seed must reproduce bytes");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gnuplot_companion_references_the_csv() {
    let dir = std::env::temp_dir().join(format!("spatmux-gp-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("curve.csv");
    let out = spatmux(&[
        "outage-curve",
        "--no-mc",
        "--points",
        "2",
        "--gnuplot",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let script = std::fs::read_to_string(dir.join("curve.gp")).unwrap();
    assert!(script.contains("curve.csv"));
    assert!(script.contains("set logscale x"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn validate_passes_with_reduced_trials() {
    let out = spatmux(&["validate", "--trials", "400"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("RESULT: 12/12 checks passed"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn decibel_conversion_round_trips() {
    for x in [1e-6, 0.5, 1.0, 10.0, 123.456, 1e8] {
        let back = db_to_linear(linear_to_db(x));
        assert!((back - x).abs() <= 1e-12 * x, "{x} -> {back}");
    }
    assert_eq!(db_to_linear(0.0), 1.0);
    assert_eq!(db_to_linear(20.0), 100.0);
}
