use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ou-design"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ou-design"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    assert_eq!(text.trim_end().lines().count(), 1, "{text}");
    serde_json::from_str(text.trim()).expect("error line is json")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn fim_constant_trend_has_zero_cross_term() {
    let v = json_ok(&["fim", "--lambda", "1", "--omega", "1", "--times", "0,1,2", "--trend", "constant"]);
    assert_eq!(v["cross_term"], 0.0);
    assert_eq!(v["omega_zero"], false);
    let q = v["q_n"].as_f64().unwrap();
    // 1 + 2 g(1) at lambda = omega = 1
    assert!((q - (1.0 + 2.0 * 0.853_282_258_706_624_5)).abs() < 1e-12);
    assert_eq!(v["metadata"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn fim_verify_on_irregular_design() {
    let v = json_ok(&[
        "fim", "--lambda", "0.37", "--omega", "-5.5", "--times", "-1.2,0.05,0.3,2.9,3.0,4.7",
        "--trend", "chandler", "--verify",
    ]);
    for key in ["oracle_delta_trend", "oracle_delta_lambda", "oracle_delta_omega", "oracle_delta_cross"] {
        assert!(v[key].as_f64().unwrap() < 1e-8, "{key}: {}", v[key]);
    }
}

#[test]
fn fim_flags_zero_frequency() {
    let v = json_ok(&["fim", "--omega", "0", "--times", "0,0.5,2"]);
    assert_eq!(v["omega_zero"], true);
}

#[test]
fn fim_reads_times_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("design.csv");
    std::fs::write(&path, "# design\nt\n0\n1\n2\n").unwrap();
    let a = json_ok(&["fim", "--times-file", path.to_str().unwrap()]);
    let b = json_ok(&["fim", "--times", "0,1,2"]);
    assert_eq!(a["q_n"], b["q_n"]);
    assert_eq!(a["i_omega"], b["i_omega"]);
}

#[test]
fn fim_rejects_unsorted_times() {
    let out = run(&["fim", "--times", "0,2,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "validation");
    assert!(out.stdout.is_empty());
}

#[test]
fn optimize_constants() {
    let w = json_ok(&["optimize", "--criterion", "omega", "--lambda", "1"]);
    assert!((w["spacings"][0].as_f64().unwrap() - 0.7968).abs() < 5e-5);
    let c = json_ok(&["optimize", "--criterion", "cov-joint", "--lambda", "1"]);
    assert!((c["spacings"][0].as_f64().unwrap() - 0.4930).abs() < 1e-4);
    let t = json_ok(&["optimize", "--criterion", "trend"]);
    assert!((t["spacings"][0].as_f64().unwrap() - 2.1835).abs() < 5e-4);
    assert_eq!(t["criterion"], "TrendD");
}

#[test]
fn optimize_lambda_reports_nonexistence() {
    let out = run(&["optimize", "--criterion", "lambda", "--lambda", "1", "--n", "5"]);
    assert_eq!(out.status.code(), Some(4));
    let err = stderr_json(&out);
    assert!(err["message"].as_str().unwrap().starts_with("no D-optimal design exists"));
    let body: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(body["supremum"], 4.0);
    assert!(body["attained_at"].is_null());
}

#[test]
fn optimize_zero_frequency_is_a_validation_error() {
    for criterion in ["trend", "all"] {
        let out = run(&["optimize", "--criterion", criterion, "--omega", "0"]);
        assert_eq!(out.status.code(), Some(2), "{criterion}");
    }
}

#[test]
fn optimize_free_mode_reports_spacings_and_spread() {
    let v = json_ok(&["optimize", "--criterion", "all", "--mode", "free", "--n", "4", "--omega", "4"]);
    assert_eq!(v["spacings"].as_array().unwrap().len(), 3);
    assert!(v["spread"].as_f64().unwrap() < 1e-5);
    assert_eq!(v["equidistant"], true);
    assert_eq!(v["diagnostics"]["seeds"].as_array().unwrap().len(), 9);
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    let args = ["optimize", "--criterion", "all", "--n", "6", "--lambda", "0.7", "--omega", "2.3"];
    let v = json_ok(&args);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let out = run(&csv_args);
    let text = String::from_utf8(out.stdout).unwrap();
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["j", "spacing"]);
    let json_rows = v["rows"].as_array().unwrap();
    for (row, jrow) in rows.iter().zip(json_rows) {
        assert_eq!(row[1], jrow[1].as_f64().unwrap());
    }
    let objective = text
        .lines()
        .find_map(|l| l.strip_prefix("# objective: "))
        .unwrap()
        .parse::<f64>()
        .unwrap();
    assert_eq!(objective, v["objective"].as_f64().unwrap());
}

#[test]
fn trend_surface_peaks_at_equidistant_optimum() {
    let out = run(&["surface", "--kind", "trend2", "--d-min", "0.05", "--d-max", "6", "--d-steps", "120", "--format", "csv"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["d1", "d2", "q_n"]);
    assert_eq!(rows.len(), 120 * 120);
    let best = rows.iter().max_by(|a, b| a[2].partial_cmp(&b[2]).unwrap()).unwrap();
    let resolution = (6.0 - 0.05) / 119.0;
    assert!((best[0] - 2.1835).abs() <= resolution && (best[1] - 2.1835).abs() <= resolution);
}

#[test]
fn optimum_curve_points_are_critical() {
    let v = json_ok(&["surface", "--kind", "dstar-omega", "--p-min", "0.5", "--p-max", "10", "--p-steps", "96"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 96);
    for r in rows {
        assert!(r[3].as_f64().unwrap().abs() < 1e-8);
    }
}

#[test]
fn efficiency_surface_is_one_at_standard_point() {
    let v = json_ok(&["surface", "--kind", "efficiency-lambda", "--p-min", "1", "--p-max", "1", "--p-steps", "1", "--n", "10"]);
    for r in v["rows"].as_array().unwrap() {
        assert_eq!(r[2], 1.0);
    }
    let out = run(&["surface", "--kind", "efficiency-lambda", "--p-min", "0", "--p-max", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn surface_grid_caps() {
    let out = run(&["surface", "--kind", "all2", "--d-steps", "100000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_validation_and_determinism() {
    let out = run(&["simulate", "--reps", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let args = ["simulate", "--reps", "50", "--seed", "9", "--format", "csv", "--trend", "chandler", "--m1", "1", "--m2", "-0.5"];
    let a = run_env(&args, "OU_DESIGN_THREADS", "1");
    let b = run_env(&args, "OU_DESIGN_THREADS", "4");
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("# seed: 9"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["t", "z1", "z2", "rep"]);
    assert_eq!(rows.len(), 50 * 5);
}

#[test]
fn simulate_validate_summary() {
    let v = json_ok(&["simulate", "--reps", "20000", "--seed", "4", "--validate", "--n", "5"]);
    assert!(v["max_relative_deviation"].as_f64().unwrap() < 0.05);
    assert_eq!(v["metadata"]["seed"], 4);
}

#[test]
fn output_file_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = run(&["surface", "--kind", "all1", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l == "d,determinant"));
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);

    let failed = dir.path().join("failed.csv");
    let out = run(&["simulate", "--reps", "0", "--output", failed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!failed.exists());
}

#[test]
fn bad_arguments_exit_two_with_one_json_line() {
    let out = run(&["optimize", "--criterion", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["exit_code"], 2);
    let out = run_env(&["optimize", "--criterion", "omega"], "OU_DESIGN_THREADS", "many");
    assert_eq!(out.status.code(), Some(2));
}
