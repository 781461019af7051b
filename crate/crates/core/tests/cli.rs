use std::collections::BTreeSet;
use std::process::Command;

use serde_json::Value;
use sfkahler::cli::{parse_trajectory_csv, run, CSV_HEADER};

fn ok(args: &[&str]) -> String {
    let mut full = vec!["sfkahler"];
    full.extend_from_slice(args);
    let o = run(full);
    assert_eq!(o.code, 0, "stderr: {}", o.stderr);
    o.stdout
}

fn code(args: &[&str]) -> (i32, String) {
    let mut full = vec!["sfkahler"];
    full.extend_from_slice(args);
    let o = run(full);
    (o.code, o.stderr)
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

fn key_set(ks: &[&str]) -> BTreeSet<String> {
    ks.iter().map(|s| s.to_string()).collect()
}

#[test]
fn classify_examples() {
    let v: Value = serde_json::from_str(&ok(&["classify", "-n", "2", "-x", "0", "-y", "-0.5"])).unwrap();
    assert_eq!(v["region"], "AxisY");
    assert_eq!(v["divisor_possible"], true);
    assert_eq!(
        keys(&v),
        key_set(&[
            "n",
            "x",
            "y",
            "region",
            "domain",
            "arc",
            "divisor_possible",
            "complete",
            "lambda",
            "lambda_critical"
        ])
    );
    let v: Value = serde_json::from_str(&ok(&["classify", "-n", "2", "-x", "0", "-y", "0"])).unwrap();
    assert_eq!(v["region"], "EuclideanFixedPoint");
    let (c, err) = code(&["classify", "-n", "2", "-x", "-2", "-y", "0.5"]);
    assert_eq!(c, 1);
    assert!(err.contains("inadmissible: 1+x+y ≤ 0"), "{err}");
}

#[test]
fn classify_grid_is_ordered() {
    let v: Value = serde_json::from_str(&ok(&["classify", "--grid", "-1:1:3,0:1:2"])).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["x"], -1.0);
    assert_eq!(rows[1]["x"], 0.0);
    assert_eq!(rows[3]["y"], 1.0);
    assert_eq!(rows[1]["region"], "EuclideanFixedPoint");
}

#[test]
fn integrate_euclidean_rows() {
    let text = ok(&[
        "integrate",
        "-n",
        "3",
        "-x",
        "0",
        "-y",
        "0",
        "--t-min",
        "-3",
        "--t-max",
        "3",
    ]);
    assert!(text.starts_with(CSV_HEADER));
    let csv = parse_trajectory_csv(&text).unwrap();
    assert!(!csv.rows.is_empty());
    for r in &csv.rows {
        assert_eq!((r[1], r[2], r[7]), (0.0, 0.0, 0.0));
    }
}

#[test]
fn integrate_minimal_seed_row() {
    let csv = parse_trajectory_csv(&ok(&["integrate", "-n", "2", "-x", "2", "-y", "-2.5"])).unwrap();
    let row = csv.rows.iter().find(|r| r[0] == 0.0).expect("row at t=0");
    assert_eq!(row[4], 1.0);
    assert!((row[5] - 0.5).abs() <= 1e-15);
    assert!(row[6].abs() <= 1e-15);
    assert!(csv.comments.iter().any(|c| c == "forward: ConvergedToOrigin"));
}

#[test]
fn integrate_region4_trailer() {
    let text = ok(&["integrate", "-n", "2", "-x", "3", "-y", "-3.5"]);
    let csv = parse_trajectory_csv(&text).unwrap();
    let blowup = csv
        .comments
        .iter()
        .find(|c| c.starts_with("backward: FiniteTimeBlowup T="))
        .expect("blowup trailer");
    let t: f64 = blowup.rsplit('=').next().unwrap().parse().unwrap();
    assert!(t < 0.0 && t > -1.0);
    assert!(csv
        .comments
        .iter()
        .any(|c| c.starts_with("forward: AdmissibleLineAsymptote w=")));
    assert!(text.lines().rev().take(3).all(|l| l.starts_with('#')));
}

#[test]
fn integrate_json_and_csv_agree() {
    let args = [
        "integrate",
        "-n",
        "2",
        "-x",
        "0.2",
        "-y",
        "0.2",
        "--t-min",
        "-2",
        "--t-max",
        "2",
    ];
    let csv = parse_trajectory_csv(&ok(&args)).unwrap();
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v: Value = serde_json::from_str(&ok(&json_args)).unwrap();
    assert_eq!(
        keys(&v),
        key_set(&["n", "seed", "tol", "forward_end", "backward_end", "samples"])
    );
    assert_eq!(keys(&v["forward_end"]), key_set(&["tag", "w", "T"]));
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.len(), csv.rows.len());
    for (s, r) in samples.iter().zip(&csv.rows) {
        assert_eq!(s["x"].as_f64().unwrap(), r[1]);
    }
}

#[test]
fn spheres_and_mass_reports() {
    let v: Value = serde_json::from_str(&ok(&["spheres", "-n", "2", "-x", "2", "-y", "-2.5"])).unwrap();
    assert_eq!(v["count"], 2);
    let s = &v["spheres"][1];
    assert_eq!(s["stability"], "Stable");
    assert_eq!(s["outermost"], true);
    assert_eq!(s["t_star"], 0.0);
    let m: Value = serde_json::from_str(&ok(&["mass", "-n", "2", "-x", "2", "-y", "-2.5"])).unwrap();
    assert_eq!(m["m_paper"], 2.5);
    assert!((m["m_numeric"].as_f64().unwrap() - 2.5).abs() < 1e-6);
    assert_eq!(
        keys(&m),
        key_set(&[
            "n",
            "seed",
            "m_numeric",
            "m_paper",
            "below_decay_threshold",
            "ale_coefficient",
            "ladder",
            "estimates"
        ])
    );
}

#[test]
fn penrose_examples() {
    let v: Value = serde_json::from_str(&ok(&["penrose", "-n", "2", "-x", "2", "-y", "-2.5"])).unwrap();
    assert_eq!(v["holds_reduced"], true);
    assert!((v["gap"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["error"], Value::Null);
    let (c, err) = code(&["penrose", "-n", "2", "-x", "1", "-y", "1"]);
    assert_eq!(c, 1);
    assert!(err.contains("seed not minimal"), "{err}");
}

#[test]
fn penrose_grid_keys_are_stable() {
    let v: Value = serde_json::from_str(&ok(&["penrose", "-n", "2", "--grid", "-0.5:2:3,-0.5:0.5:2"])).unwrap();
    let rows = v.as_array().unwrap();
    assert!(!rows.is_empty());
    let first = keys(&rows[0]);
    assert!(rows.iter().all(|r| keys(r) == first));
}

#[test]
fn portrait_contents() {
    let svg = ok(&["portrait", "-n", "3"]);
    assert!(svg.contains("viewBox=\"0 0 680 800\""));
    assert!(svg.contains("id=\"tangency\" data-x=\"2\" data-y=\"-3\""));
    assert!(!svg.contains("class=\"level\""));
    let svg = ok(&["portrait", "-n", "2", "--levels", "1,4,8"]);
    assert!(svg.contains("data-region=\"Region2_AE_Exterior\""));
    assert!(svg.contains("id=\"critical-yellow\""));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.svg");
    let stdout = ok(&["portrait", "-n", "2", "--out", path.to_str().unwrap()]);
    assert!(stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("<svg"));
}

#[test]
fn exit_code_contract() {
    assert_eq!(code(&["integrate", "-x", "1"]).0, 2);
    assert_eq!(code(&["integrate", "-x", "1", "-y", "1", "--format", "svg"]).0, 2);
    assert_eq!(code(&["integrate", "-x", "-3", "-y", "0"]).0, 1);
    assert_eq!(code(&["portrait", "--levels", "-1"]).0, 2);
    assert_eq!(code(&["classify", "--grid", "1:2"]).0, 2);
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_sfkahler"))
        .args(["classify", "-n", "2", "-x", "-2", "-y", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_sfkahler"))
        .args(["verify", "--fast"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}
