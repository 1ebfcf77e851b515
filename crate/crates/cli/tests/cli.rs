use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn abelsob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abelsob"))
        .args(args)
        .env_remove("ABELSOB_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_forcing(path: &Path, n: usize) {
    let mut s = String::from("index,re,im\n");
    for i in 0..n {
        let t = std::f64::consts::TAU * i as f64 / n as f64;
        s.push_str(&format!("{i},{},0\n", 0.01 * t.cos()));
    }
    std::fs::write(path, s).unwrap();
}

#[test]
fn info_reports_constants() {
    let o = abelsob(&["info", "--group", "Z4", "--weight", "sym-euclid", "--s", "1", "--json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let c = v["constants"][0]["sup_constant"].as_f64().unwrap();
    assert!((c - 2.2f64.sqrt()).abs() < 1e-15);
    assert_eq!(v["order"], 4);

    let o = abelsob(&["info", "--group", "Z2xZ2", "--weight", "hamming", "--json"]);
    let v = json(&o);
    assert_eq!(v["c_gamma"], 1.0);
    assert_eq!(v["gamma_min"], 0.0);
    assert_eq!(v["gamma_max"], 2.0);
    assert_eq!(v["subadditivity"]["ok"], true);

    let o = abelsob(&["info", "--group", "Z4"]);
    assert!(stdout(&o).contains("C = 1.48323969741913"));
}

#[test]
fn usage_errors_exit_2() {
    let o = abelsob(&["info", "--group", "Z0"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Z0"));
    assert_eq!(code(&abelsob(&["info"])), 2);
    assert_eq!(code(&abelsob(&["info", "--group", "Z4", "--weight", "cosine"])), 2);
    assert_eq!(code(&abelsob(&["frobnicate"])), 2);
    assert_eq!(code(&abelsob(&["solve-nonlinear", "--group", "Z8", "--theta", "0"])), 2);
    assert_eq!(code(&abelsob(&["info", "--group", "Z12", "--weight", "pruefer:2"])), 2);
}

#[test]
fn config_file_mirrors_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"group": "Z4", "weight": "sym-euclid", "s": [1, 2]}"#).unwrap();
    let v = json(&abelsob(&["info", "--config", p(&cfg), "--json"]));
    assert_eq!(v["group"], "Z4");
    assert_eq!(v["constants"].as_array().unwrap().len(), 2);
    // flags win over the file
    let v = json(&abelsob(&["info", "--config", p(&cfg), "--group", "Z8", "--json"]));
    assert_eq!(v["group"], "Z8");

    std::fs::write(&cfg, r#"{"group": "Z4", "bogus": 1}"#).unwrap();
    assert_eq!(code(&abelsob(&["info", "--config", p(&cfg)])), 2);
    std::fs::write(&cfg, "not json").unwrap();
    assert_eq!(code(&abelsob(&["info", "--config", p(&cfg)])), 2);
}

#[test]
fn transform_with_oracle_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.csv");
    let spec = dir.path().join("F.json");
    let back = dir.path().join("back.csv");
    let mut s = String::from("index,re,im\n");
    for i in 0..30 {
        s.push_str(&format!("{i},{},{}\n", (i as f64).sin(), (i as f64 * 0.3).cos()));
    }
    std::fs::write(&f, &s).unwrap();
    let o = abelsob(&["transform", "--group", "Z2xZ3xZ5", "--input", p(&f), "--output", p(&spec), "--oracle", "--json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json(&o)["oracle_relative_error"].as_f64().unwrap() < 1e-10);
    let o = abelsob(&["transform", "--input", p(&spec), "--inverse", "--naive", "--output", p(&back)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&back).unwrap();
    let row: Vec<f64> = text.lines().nth(4).unwrap().split(',').skip(1).map(|x| x.parse().unwrap()).collect();
    assert!((row[0] - 3f64.sin()).abs() < 1e-12 && (row[1] - 0.9f64.cos()).abs() < 1e-12);
    // CSV input without a group is a usage error
    assert_eq!(code(&abelsob(&["transform", "--input", p(&f)])), 2);
}

#[test]
fn check_is_deterministic_and_catches_bugs() {
    let args = ["check", "--seed", "7", "--samples", "16", "--translation-samples", "4", "--json"];
    let a = abelsob(&args);
    let b = abelsob(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["passed"], true);

    let o = abelsob(&["check", "--samples", "8", "--translation-samples", "2", "--suite", "sobolev", "--inject-bug", "--json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    let failed: Vec<&Value> = v["properties"].as_array().unwrap().iter().filter(|p| p["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0]["witness"]["values"].is_array());
}

#[test]
fn solve_linear_writes_solution_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.csv");
    let u = dir.path().join("u.csv");
    let rep = dir.path().join("report.json");
    write_forcing(&g, 64);
    let o = abelsob(&[
        "solve-linear", "--group", "Z64", "--weight", "sym-euclid", "--s", "1", "--c", "0.5",
        "--input", p(&g), "--output", p(&u), "--report", p(&rep),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["isometry_ok"], true);
    assert_eq!(v["sup_ok"], true);
    assert_eq!(v["overflow_count"], 0);
    assert!(v["version"].is_string());
    assert_eq!(std::fs::read_to_string(&u).unwrap().lines().count(), 65);
}

#[test]
fn solve_nonlinear_reference_problem() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    let phi = dir.path().join("phi.csv");
    let rep = dir.path().join("report.json");
    write_forcing(&h, 64);
    let o = abelsob(&[
        "solve-nonlinear", "--group", "Z64", "--weight", "sym-euclid", "--c", "1.0",
        "--nonlinearity", "forced-power:2,0.1", "--forcing", p(&h), "--theta", "1.0",
        "--tol", "1e-10", "--max-iter", "500", "--output", p(&phi), "--report", p(&rep),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    for key in [
        "converged", "iterations", "residual_history", "final_residual_eq", "norms",
        "ball_respected", "continuity_constant", "config", "version",
    ] {
        assert!(!v[key].is_null(), "missing {key}");
    }
    assert!(v["final_residual_eq"].as_f64().unwrap() < 1e-10);
    assert!(v["iterations"].as_u64().unwrap() < 50);
    assert_eq!(v["config"]["nonlinearity"], "forced-power:2,0.1");
    assert!(phi.exists());
}

#[test]
fn solve_nonlinear_failure_exits_1_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("report.json");
    let o = abelsob(&[
        "solve-nonlinear", "--group", "Z16", "--c", "0.1", "--nonlinearity", "forced-power:2,5",
        "--forcing-norm", "50", "--max-iter", "40", "--report", p(&rep),
    ]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["converged"], false);
}

#[test]
fn sweep_rows_are_ordered_and_deterministic() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_abelsob"))
            .args(["sweep", "--group", "Z32", "--param", "c", "--values", "0.1,0.5,1,2"])
            .env("ABELSOB_WORKERS", workers)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("param,value,converged"));
    let l2: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(6).unwrap().parse().unwrap()).collect();
    assert!(l2.windows(2).all(|w| w[1] <= w[0]), "{l2:?}");

    assert_eq!(code(&run("0")), 2);
}

#[test]
fn sweep_records_failures_without_aborting() {
    let o = abelsob(&[
        "sweep", "--group", "Z16", "--c", "0.1", "--nonlinearity", "forced-power:2,5",
        "--max-iter", "40", "--param", "forcing-norm", "--values", "0.001,50",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",true,"));
    assert!(rows[1].contains(",false,"));
}

#[test]
fn sweep_usage_errors() {
    assert_eq!(code(&abelsob(&["sweep", "--group", "Z8", "--param", "c", "--values", ""])), 2);
    assert_eq!(code(&abelsob(&["sweep", "--group", "Z8", "--param", "colour", "--values", "1"])), 2);
    assert_eq!(code(&abelsob(&["sweep", "--group", "Z8", "--values", "1"])), 2);
}

#[test]
fn constants_table() {
    let v = json(&abelsob(&["constants", "--group", "Z16", "--s", "1", "--compactness", "--json"]));
    let row = &v["rows"][0];
    assert_eq!(row["s"], 1.0);
    let prof = row["compactness"].as_array().unwrap();
    assert_eq!(prof.len(), 16);
    assert!(prof.iter().all(|r| r["within_bound"] == true));
    assert_eq!(row["lalpha"].as_array().unwrap().len(), 3);
}
