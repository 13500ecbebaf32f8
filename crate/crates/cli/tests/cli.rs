//! End-to-end tests of the `tailstab` binary and the library pipeline:
//! exit codes, file formats, diagnostics, and reproducibility.

use std::path::Path;
use std::process::Command;
use tailstab_cli::config::ExperimentConfig;
use tailstab_cli::pipeline::run_experiment;
use tailstab_cli::report::{write_draws, write_report, RunReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tailstab"))
}

fn frechet_max_linear_config() -> serde_json::Value {
    serde_json::json!({
        "process": {
            "kind": "max_linear",
            "innovation": {"family": "frechet", "nu": 1.0, "p": 1.0, "scale": 1.0},
            "coefficients": {"family": "explicit", "values": [1.0, 1.0, 0.25, 0.1111111111111111, 0.0625]}
        },
        "reps": 30000,
        "lags": [1, 2, 3, 4],
        "y_quantile": 0.95,
        "q": 2.0,
        "seed": 99,
        "mode": "verify",
        "grid": {"z_grid_size": 30, "min_exceed": 100, "confidence": 0.01},
        "verify": {"path_len": 1000000, "ratio_quantile": 0.995, "ratio_tol": 0.1, "vol_case": 1}
    })
}

fn write_config(dir: &Path, value: &serde_json::Value) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

#[test]
fn malformed_config_exits_one_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = frechet_max_linear_config();
    cfg["y_quantile"] = serde_json::json!(1.2);
    let config = write_config(dir.path(), &cfg);
    let out = bin()
        .args(["tas", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("y_quantile"), "{stderr}");
}

#[test]
fn missing_output_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &frechet_max_linear_config());
    let out = bin().args(["tas", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));
}

#[test]
fn verify_mode_emits_oracle_checks_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &frechet_max_linear_config());
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["verify", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .arg("--threads")
        .arg("2")
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "stdout:\n{stdout}");
    assert!(stdout.contains("theta_oracle"), "{stdout}");
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let oracles = report.oracles.expect("oracle rows present");
    assert_eq!(oracles.theta.len(), 4);
    assert!(oracles.theta.iter().all(|r| r.within_3_se));
    assert!(oracles.theta.iter().all(|r| (r.delta - (r.theta_hat - r.exact_sup)).abs() < 1e-15));
    // theta.csv rows for the estimated curve
    let theta = std::fs::read_to_string(out_dir.join("theta.csv")).unwrap();
    assert!(theta.starts_with("lag,abs_coeff,theta_hat,upper_conf,n_exceed_at_y\n"));
    assert_eq!(theta.lines().count(), 5);
}

#[test]
fn tas_mode_reports_m_dependence_ceiling() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "process": {
            "kind": "linear",
            "innovation": {"family": "pareto", "nu": 2.0},
            "coefficients": {"family": "explicit", "values": [1.0, 0.7, 0.4, 0.2, 0.0, 0.0, 0.0]}
        },
        "reps": 30000,
        "lags": [0, 1, 2, 3, 4, 5, 6],
        "y_quantile": 0.9,
        "q": 2.0,
        "seed": 4,
        "mode": "tas_curve"
    });
    let config = write_config(dir.path(), &cfg);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["tas", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "stdout:\n{stdout}");
    assert!(stdout.contains("m_dependence_ceiling"), "{stdout}");
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let sum = report.theta_sum.expect("theta sum present");
    assert_eq!(sum.m_dependence_bound, Some(4.0));
    assert!(sum.sum <= 4.0);
    // zeros beyond lag 3 appear as literal "0" cells
    let theta = std::fs::read_to_string(out_dir.join("theta.csv")).unwrap();
    for line in theta.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let lag: usize = cells[0].parse().unwrap();
        if lag > 3 {
            assert_eq!(cells[2], "0", "lag {lag} row: {line}");
        }
    }
}

#[test]
fn tailstats_data_mode_reads_csv_and_skips_rate_factor() {
    let dir = tempfile::tempdir().unwrap();
    // Pareto-looking synthetic column with a header line
    let mut data = String::from("value\n");
    let mut state = 7u64;
    for _ in 0..30000 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let u = ((state >> 11) as f64 / (1u64 << 53) as f64).max(1e-12);
        data.push_str(&format!("{}\n", u.powf(-0.5)));
    }
    let data_path = dir.path().join("data.csv");
    std::fs::write(&data_path, data).unwrap();
    let cfg = serde_json::json!({
        "process": {
            "kind": "linear",
            "innovation": {"family": "pareto", "nu": 2.0},
            "coefficients": {"family": "explicit", "values": [1.0]}
        },
        "reps": 1000,
        "lags": [0],
        "y_quantile": 0.9,
        "q": 2.0,
        "seed": 11,
        "mode": "tail_stats",
        "tail_stats": {"x_quantile": 0.99, "k_max": 5, "alpha_n": 0.05,
                        "data_csv": data_path.to_str().unwrap()}
    });
    let config = write_config(dir.path(), &cfg);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["tailstats", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let ts = report.tail_stats.expect("tail stats present");
    assert!(ts.data_mode);
    assert!(ts.psi_n.is_none());
    assert!(ts.clt_stat.is_none());
    assert_eq!(ts.taus.len(), 6);
    assert_eq!(ts.taus[0].tau_hat, 1.0);
    // theta table absent in this mode: header-only CSV is still valid
    let theta = std::fs::read_to_string(out_dir.join("theta.csv")).unwrap();
    assert_eq!(theta, "lag,abs_coeff,theta_hat,upper_conf,n_exceed_at_y\n");
}

#[test]
fn seed_override_changes_outputs_and_reruns_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = frechet_max_linear_config();
    cfg["mode"] = serde_json::json!("tas_curve");
    cfg["reps"] = serde_json::json!(5000);
    cfg["grid"] = serde_json::json!({"z_grid_size": 20, "min_exceed": 50, "confidence": 0.01});
    let config = write_config(dir.path(), &cfg);
    let run = |out: &Path, seed: Option<&str>, threads: &str| {
        let mut c = bin();
        c.args(["tas", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(out)
            .args(["--threads", threads]);
        if let Some(s) = seed {
            c.args(["--seed", s]);
        }
        let st = c.output().unwrap();
        assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    };
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    run(&a, None, "1");
    run(&b, None, "2");
    run(&c, Some("123456"), "2");
    let read = |p: &Path| std::fs::read(p.join("theta.csv")).unwrap();
    assert_eq!(read(&a), read(&b), "thread count changed the CSV bytes");
    assert_ne!(read(&a), read(&c), "seed override had no effect");
}

#[test]
fn env_thread_fallback_and_subcommand_mode_override() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = frechet_max_linear_config();
    cfg["reps"] = serde_json::json!(5000);
    cfg["grid"] = serde_json::json!({"z_grid_size": 20, "min_exceed": 50, "confidence": 0.01});
    // config says verify; the tas subcommand must win
    let config = write_config(dir.path(), &cfg);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["tas", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .env("TAILSTAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report.config.mode, tailstab_cli::Mode::TasCurve);
    assert!(report.oracles.is_none(), "verify-only section must be absent");
}

#[test]
fn report_round_trips_and_draws_export() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = frechet_max_linear_config();
    cfg["mode"] = serde_json::json!("tas_curve");
    cfg["reps"] = serde_json::json!(2000);
    cfg["grid"] = serde_json::json!({"z_grid_size": 15, "min_exceed": 30, "confidence": 0.01});
    cfg["export_draws"] = serde_json::json!(true);
    let config: ExperimentConfig = serde_json::from_value(cfg).unwrap();
    let artifacts = run_experiment(&config).unwrap();
    let out_dir = dir.path().join("out");
    write_report(&artifacts.report, &out_dir).unwrap();
    let draws = artifacts.draws.expect("draws exported");
    write_draws(&draws, &config.process, &out_dir).unwrap();

    let parsed: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(parsed, artifacts.report);

    let csv = std::fs::read_to_string(out_dir.join("draws.csv")).unwrap();
    assert!(csv.starts_with("replication,lag,x,x_star\n"));
    assert_eq!(csv.lines().count(), 1 + 4 * 2000);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("draws_meta.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["seed"], 99);
    assert_eq!(sidecar["spec"]["kind"], "max_linear");
}

#[test]
fn full_mode_on_a_stable_linear_process() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "process": {
            "kind": "linear",
            "innovation": {"family": "symmetric_stable", "nu": 1.5, "p": 0.5},
            "coefficients": {"family": "power_decay", "zeta": 2.5, "c": 1.0,
                              "kappa": 1.0, "trunc_tol": 5e-2}
        },
        "reps": 5000,
        "lags": [0, 1, 2, 3],
        "y_quantile": 0.9,
        "q": 2.0,
        "seed": 33,
        "mode": "full",
        "grid": {"z_grid_size": 20, "min_exceed": 50, "confidence": 0.01},
        "tail_stats": {"n": 20000, "x_quantile": 0.99, "k_max": 6, "alpha_n": 0.05},
        "verify": {"path_len": 1000000, "ratio_quantile": 0.999, "ratio_tol": 0.1, "vol_case": 1}
    });
    let config = write_config(dir.path(), &cfg);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["full", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "stdout:\n{stdout}");
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let by_name = |n: &str| report.checks.iter().find(|c| c.name == n).unwrap();
    assert_eq!(
        by_name("tail_equivalence").status,
        tailstab_cli::report::CheckStatus::Pass,
        "{:?}",
        by_name("tail_equivalence")
    );
    assert_eq!(
        by_name("stable_sum_stability").status,
        tailstab_cli::report::CheckStatus::Pass,
        "{:?}",
        by_name("stable_sum_stability")
    );
    // the sufficiency table used the stable rows
    let suff = report.sufficiency.expect("sufficiency verdict");
    assert!(suff.case.contains("stable"), "{}", suff.case);
    assert!(suff.certified);
}

#[test]
fn failing_check_exits_two() {
    // zeta = 2 with q = 2 sits exactly on the divergence boundary of
    // the stable sufficiency certificate: sum |a_i|^{1/2} diverges, the
    // check fails, and the runner must report it through the exit code
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "process": {
            "kind": "linear",
            "innovation": {"family": "symmetric_stable", "nu": 1.5, "p": 0.5},
            "coefficients": {"family": "power_decay", "zeta": 2.0, "c": 1.0,
                              "kappa": 1.0, "trunc_tol": 5e-2}
        },
        "reps": 5000,
        "lags": [0, 1, 2],
        "y_quantile": 0.9,
        "q": 2.0,
        "seed": 34,
        "mode": "tas_curve",
        "grid": {"z_grid_size": 20, "min_exceed": 50, "confidence": 0.01}
    });
    let config = write_config(dir.path(), &cfg);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["tas", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let suff = report
        .checks
        .iter()
        .find(|c| c.name == "sufficiency_summability")
        .unwrap();
    assert_eq!(suff.status, tailstab_cli::report::CheckStatus::Fail);
    assert!(report.any_failed());
}

#[test]
fn verify_heavy_volatility_case_two_checks_mc_constant() {
    let dir = tempfile::tempdir().unwrap();
    // volatility tail (index 1.5) dominates the linear part (index 3)
    let cfg = serde_json::json!({
        "process": {
            "kind": "stoch_vol",
            "innovation": {"family": "pareto", "nu": 3.0},
            "coefficients": {"family": "explicit", "values": [1.0, 0.5, 0.25]},
            "volatility": {"kind": "heavy", "law": {"family": "pareto", "nu": 1.5}}
        },
        "reps": 5000,
        "lags": [0, 1, 2],
        "y_quantile": 0.9,
        "q": 2.0,
        "seed": 21,
        "mode": "verify",
        "grid": {"z_grid_size": 20, "min_exceed": 50, "confidence": 0.01},
        "verify": {"path_len": 1000000, "ratio_quantile": 0.995, "ratio_tol": 0.1, "vol_case": 2}
    });
    let config = write_config(dir.path(), &cfg);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["verify", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "stdout:\n{stdout}");
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let breiman = report
        .checks
        .iter()
        .find(|c| c.name == "breiman_constant")
        .unwrap();
    assert_eq!(breiman.status, tailstab_cli::report::CheckStatus::Pass, "{breiman:?}");
    // hill check targets the volatility index in the heavy case
    let hill = report.checks.iter().find(|c| c.name == "hill_index").unwrap();
    assert_eq!(hill.expected, Some(1.5));
    assert_eq!(hill.status, tailstab_cli::report::CheckStatus::Pass, "{hill:?}");
}

#[test]
fn verify_equal_index_volatility_case_three_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "process": {
            "kind": "stoch_vol",
            "innovation": {"family": "pareto", "nu": 2.0},
            "coefficients": {"family": "explicit", "values": [1.0, 0.5]},
            "volatility": {"kind": "heavy", "law": {"family": "pareto", "nu": 2.0}}
        },
        "reps": 5000,
        "lags": [0, 1],
        "y_quantile": 0.9,
        "q": 2.0,
        "seed": 22,
        "mode": "verify",
        "grid": {"z_grid_size": 20, "min_exceed": 50, "confidence": 0.01},
        "verify": {"path_len": 500000, "ratio_quantile": 0.995, "ratio_tol": 0.1, "vol_case": 3}
    });
    let config = write_config(dir.path(), &cfg);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["verify", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let breiman = report
        .checks
        .iter()
        .find(|c| c.name == "breiman_constant")
        .unwrap();
    assert_eq!(breiman.status, tailstab_cli::report::CheckStatus::Skipped);
    assert!(breiman.detail.contains("hill_estimate"), "{}", breiman.detail);
    // the index diagnostic still runs, expecting the common index
    let hill = report.checks.iter().find(|c| c.name == "hill_index").unwrap();
    assert_eq!(hill.expected, Some(2.0));
}

#[test]
fn insufficient_exceedances_exit_one_with_lag_and_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = frechet_max_linear_config();
    cfg["mode"] = serde_json::json!("tas_curve");
    cfg["reps"] = serde_json::json!(1000);
    // default grid floor of 200 cannot be met by 1000 * 5% exceedances
    cfg["grid"] = serde_json::json!({"z_grid_size": 30, "min_exceed": 200, "confidence": 0.01});
    let config = write_config(dir.path(), &cfg);
    let out = bin()
        .args(["tas", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("insufficient exceedances") && stderr.contains("lag"),
        "{stderr}"
    );
}
