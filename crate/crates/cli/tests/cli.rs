use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbm"))
        .args(args)
        .env_remove("HBM_BUDGET_SPAIRS")
        .env_remove("HBM_TIME_LIMIT")
        .output()
        .expect("spawn hbm")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json_of(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&hbm(args))).expect("valid JSON")
}

fn assert_schema(name: &str, instance: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

fn value_after(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no {key} in {text}"));
    line[key.len()..].trim().parse().unwrap()
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_owned();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn solve_second_order_text() {
    let text = stdout(&hbm(&["-q", "solve", "--m", "0", "--order", "2", "--digits", "12"]));
    // C₂(0) = √218·π/9 and ω² = 162/109.
    let c = value_after(&text, "C_N = ");
    assert!((c - 218f64.sqrt() * std::f64::consts::PI / 9.0).abs() < 1e-10, "{c}");
    assert!(text.contains("C_N = 5.15389"));
    let omega = value_after(&text, "omega = ");
    assert!((omega - (162.0f64 / 109.0).sqrt()).abs() < 1e-10);
    assert!(text.contains("omega = 1.21911"));
    assert!(text.contains("109*w^2") || text.contains("a1 + 10*a3"), "{text}");
}

#[test]
fn solve_third_order_json() {
    let v = json_of(&["-q", "solve", "--m", "0", "--order", "3", "--format", "json"]);
    assert_eq!(v["univariate_degree"], 8);
    assert_eq!(v["N"], 3);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 3);
    assert_schema("solve.schema.json", &v);
}

#[test]
fn solve_amplitude_is_exact_and_scales() {
    // ω scales as 1/A for every m here; C_N does not depend on A.
    let one = json_of(&["-q", "solve", "--m", "1", "--order", "1", "--digits", "20", "--format", "json"]);
    let half = json_of(&["-q", "solve", "--m", "1", "--order", "1", "--digits", "20", "--amplitude", "1/2", "--format", "json"]);
    assert_eq!(half["amplitude"], "1/2");
    assert_eq!(one["period_coefficient_decimal"], half["period_coefficient_decimal"]);
    let w1: f64 = one["omega_decimal"].as_str().unwrap().parse().unwrap();
    let w2: f64 = half["omega_decimal"].as_str().unwrap().parse().unwrap();
    assert!((w2 - 2.0 * w1).abs() < 1e-14);
    let dec = json_of(&["-q", "solve", "--m", "1", "--order", "1", "--digits", "20", "--amplitude", "0.5", "--format", "json"]);
    assert_eq!(dec["omega_decimal"], half["omega_decimal"]);
}

#[test]
fn solve_rejects_bad_input() {
    for args in [
        &["solve", "--m", "0", "--order", "1", "--amplitude", "0"][..],
        &["solve", "--m", "0", "--order", "1", "--amplitude", "-1/2"],
        &["solve", "--m", "0", "--order", "1", "--amplitude", "one"],
        &["solve", "--m", "0", "--order", "0"],
        &["solve", "--m", "0", "--order", "1", "--digits", "0"],
        &["solve", "--m", "0", "--order", "1", "--time-limit", "-3"],
    ] {
        let out = hbm(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn solve_budget_exhaustion_has_its_own_code() {
    let out = hbm(&["solve", "--m", "0", "--order", "3", "--budget-spairs", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("S-pairs"));
}

#[test]
fn budget_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_hbm"))
        .args(["-q", "solve", "--m", "0", "--order", "3"])
        .env("HBM_BUDGET_SPAIRS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn table_single_cell() {
    let text = stdout(&hbm(&["-q", "table", "--max-m", "0", "--max-order", "1"]));
    assert!(text.contains("11.38"), "{text}");
    let csv = stdout(&hbm(&["-q", "table", "--max-m", "0", "--max-order", "1", "--format", "csv"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m,N,C_N,error_percent"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..2], &["0", "1"]);
    assert_eq!(row[3], "11.38");
    // C₁(0) = √2·π.
    let c: f64 = row[2].parse().unwrap();
    assert!((c - 2f64.sqrt() * std::f64::consts::PI).abs() < 1e-10);
}

#[test]
fn table_first_three_rows() {
    let expected = [[11.38, 2.80, 1.55], [8.54, 5.19, 2.68], [8.54, 5.17, 2.56]];
    let v = json_of(&["-q", "table", "--max-m", "2", "--max-order", "3", "--format", "json"]);
    assert_schema("table.schema.json", &v);
    let cells = v.as_array().unwrap();
    assert_eq!(cells.len(), 9);
    for cell in cells {
        let m = cell["m"].as_u64().unwrap() as usize;
        let n = cell["N"].as_u64().unwrap() as usize;
        assert_eq!(cell["status"], "solved");
        let shown: f64 = cell["error_percent_display"].as_str().unwrap().parse().unwrap();
        assert!((shown - expected[m][n - 1]).abs() <= 0.010 + 1e-9, "({m},{n}): {shown}");
    }
}

#[test]
fn table_budget_cells_render_as_dash() {
    let csv = stdout(&hbm(&["-q", "table", "--max-m", "0", "--max-order", "3", "--budget-spairs", "2", "--format", "csv"]));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].ends_with(",11.38"));
    assert_eq!(rows[2], "0,3,-,-");
    let v = json_of(&["-q", "table", "--max-m", "0", "--max-order", "3", "--budget-spairs", "2", "--format", "json"]);
    assert_schema("table.schema.json", &v);
    assert_eq!(v[2]["status"], "budget_exhausted");
}

#[test]
fn table_empty_range() {
    let csv = stdout(&hbm(&["-q", "table", "--max-m", "3", "--max-order", "0", "--format", "csv"]));
    assert_eq!(csv, "m,N,C_N,error_percent\n");
    assert_eq!(stdout(&hbm(&["-q", "table", "--max-m", "3", "--max-order", "0"])), "");
    let v = json_of(&["-q", "table", "--max-m", "3", "--max-order", "0", "--format", "json"]);
    assert_eq!(v, Value::Array(vec![]));
    assert_schema("table.schema.json", &v);
}

#[test]
fn period_exact() {
    let text = stdout(&hbm(&["-q", "period", "--amplitude", "1", "--method", "exact"]));
    assert!(text.contains("5.01325654"), "{text}");
    let v = json_of(&["-q", "period", "--amplitude", "2", "--format", "json"]);
    assert_schema("period.schema.json", &v);
    let t = v[0]["value"].as_f64().unwrap();
    assert!((t - 4.0 * (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-14);
}

#[test]
fn period_quadrature_and_ode_agree() {
    let v = json_of(&[
        "-q", "period", "--amplitude", "1", "--k", "0.01", "--method", "quadrature", "--method", "ode", "--format", "json",
    ]);
    assert_schema("period.schema.json", &v);
    let q = v[0]["value"].as_f64().unwrap();
    let o = v[1]["value"].as_f64().unwrap();
    assert_eq!(v[0]["method"], "quadrature");
    assert_eq!(v[1]["method"], "ode");
    assert!(((q - o) / q).abs() < 1e-6, "{q} vs {o}");
    // The regularised period lies above the singular one.
    assert!(q > 2.0 * (2.0 * std::f64::consts::PI).sqrt());
}

#[test]
fn period_rejects_bad_input() {
    for args in [
        &["period", "--amplitude", "1", "--k", "-1"][..],
        &["period", "--amplitude", "1", "--method", "ode"],
        &["period", "--amplitude", "0"],
    ] {
        assert_eq!(hbm(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn emit_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    stdout(&hbm(&["-q", "emit", "trajectory", "--amplitude", "1", "--k", "0.02", "--t-max", "20", "--out", path.to_str().unwrap()]));
    let (header, rows) = read_csv(&path);
    assert_eq!(header, "t,x,y");
    assert_eq!(rows[0], vec![0.0, 1.0, 0.0]);
    assert!((rows.last().unwrap()[0] - 20.0).abs() < 1e-12);
    // Energy y²/2 + ln(x² + k²)/2 is conserved.
    let k2 = 0.02f64 * 0.02;
    let energy = |r: &Vec<f64>| 0.5 * r[2] * r[2] + 0.5 * (r[1] * r[1] + k2).ln();
    let e0 = energy(&rows[0]);
    assert!(rows.iter().all(|r| (energy(r) - e0).abs() < 1e-8));

    let again = dir.path().join("again.csv");
    stdout(&hbm(&["-q", "emit", "trajectory", "--k", "0.02", "--t-max", "20", "--out", again.to_str().unwrap()]));
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn emit_trajectory_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("phase.csv");
    let base = base.to_str().unwrap();
    stdout(&hbm(&["-q", "emit", "trajectory", "--k", "1", "--k", "0.02", "--k", "0.001", "--t-max", "10", "--out", base]));
    for k in ["1", "0.02", "0.001"] {
        let (header, rows) = read_csv(&dir.path().join(format!("phase_k{k}.csv")));
        assert_eq!(header, "t,x,y");
        assert!(rows.len() > 10);
    }
    assert_eq!(hbm(&["emit", "trajectory", "--k", "1,0.5"]).status.code(), Some(2));
}

#[test]
fn emit_weak_solution_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.csv");
    let p = path.to_str().unwrap();
    stdout(&hbm(&["-q", "emit", "weaksol", "--amplitude", "1", "--from", "-8", "--to", "8", "--step", "0.01", "--out", p]));
    let (header, rows) = read_csv(&path);
    assert_eq!(header, "t,x");
    assert_eq!(rows.len(), 1601);
    let half = (2.0 * std::f64::consts::PI).sqrt() / 2.0;
    let crossings: Vec<f64> = rows
        .windows(2)
        .filter(|w| w[0][1] * w[1][1] < 0.0)
        .map(|w| w[0][0] - w[0][1] * (w[1][0] - w[0][0]) / (w[1][1] - w[0][1]))
        .collect();
    for target in [-half, half] {
        assert!(crossings.iter().any(|&z| (z - target).abs() < 0.01), "{target}: {crossings:?}");
    }
    // Zeros repeat every √(2π).
    for pair in crossings.windows(2) {
        assert!((pair[1] - pair[0] - 2.0 * half).abs() < 0.02);
    }
}

#[test]
fn io_failure_exit_code() {
    let out = hbm(&["emit", "weaksol", "--from", "0", "--to", "1", "--step", "0.5", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent-dir/x.csv"));
}

#[test]
fn schemas_reject_malformed_output() {
    let load = |name: &str| -> Value {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema").join(name);
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
    };
    let solve = jsonschema::validator_for(&load("solve.schema.json")).unwrap();
    let mut v = json_of(&["-q", "solve", "--m", "0", "--order", "1", "--format", "json"]);
    assert!(solve.is_valid(&v));
    v.as_object_mut().unwrap().remove("univariate_degree");
    assert!(!solve.is_valid(&v));

    let table = jsonschema::validator_for(&load("table.schema.json")).unwrap();
    let bad = serde_json::json!([{"m": 0, "N": 1, "C_N": null, "error_percent": 1.0,
                                  "error_percent_display": "1.00", "status": "failed", "message": "x"}]);
    assert!(!table.is_valid(&bad));

    let period = jsonschema::validator_for(&load("period.schema.json")).unwrap();
    let bad = serde_json::json!([{"value": 5.0, "method": "ode", "estimated_error": 0.0, "amplitude": 1.0, "k": null}]);
    assert!(!period.is_valid(&bad));
}
