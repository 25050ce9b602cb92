//! End-to-end checks of the command-line surface: values, exit codes,
//! export files and output determinism.

use serde_json::Value;
use std::process::{Command, Output};

fn gonchar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gonchar"))
        .args(args)
        .env_remove("GONCHAR_CONFIG")
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON record")
}

#[test]
fn potential_harmonic_value() {
    let out = gonchar(&["potential", "--d", "3", "--s", "2", "--r", "2"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["schema_version"], "1");
    let value = v["results"][0]["value"].as_f64().unwrap();
    assert!((value - 0.25).abs() < 1e-13);
}

#[test]
fn potential_quadrature_at_center() {
    let out = gonchar(&[
        "potential",
        "--d",
        "2",
        "--s",
        "1.5",
        "--r",
        "0",
        "--method",
        "quadrature",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert!((v["results"][0]["value"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(v["results"][0]["method"], "quadrature");
}

#[test]
fn potential_special_d7() {
    let out = gonchar(&[
        "potential",
        "--d",
        "7",
        "--s",
        "2",
        "--r",
        "2",
        "--method",
        "special",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert!((v["results"][0]["value"].as_f64().unwrap() - 14.1 / 64.0).abs() < 1e-14);
}

#[test]
fn potential_multiple_radii_and_log() {
    let out = gonchar(&[
        "potential",
        "--d",
        "2",
        "--s",
        "log",
        "--r",
        "0",
        "--r",
        "3",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["results"].as_array().unwrap().len(), 2);
    assert_eq!(v["results"][0]["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn critical_golden_ratio() {
    let out = gonchar(&[
        "critical", "--d", "2", "--s", "1", "--q", "1", "--side", "exterior",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["results"]["kind"], "one");
    let dist = v["results"]["distance_to_sphere"][0].as_f64().unwrap();
    assert!((dist - 1.6180339887498949).abs() < 1e-10);
    // human summary on stderr
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("1.6180339887"));
}

#[test]
fn critical_log_weak_negative() {
    let out = gonchar(&[
        "critical", "--d", "2", "--s", "log", "--q", "-1", "--side", "exterior",
    ]);
    assert!(out.status.success());
    assert_eq!(json_stdout(&out)["results"]["kind"], "none");
}

#[test]
fn critical_two_roots() {
    let out = gonchar(&[
        "critical", "--d", "4", "--s", "1", "--q", "-0.99", "--side", "interior",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["results"]["kind"], "two");
    let r1 = v["results"]["radii"][0].as_f64().unwrap();
    let r2 = v["results"]["radii"][1].as_f64().unwrap();
    assert!(r1 < 0.507122392 && 0.507122392 < r2);
}

#[test]
fn poly_linear_family() {
    let out = gonchar(&["poly", "--kind", "D", "--d", "9", "--q", "-1"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    let coeffs: Vec<&str> = v["results"]["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap())
        .collect();
    assert_eq!(coeffs, vec!["-1/1", "1/1"]);
}

#[test]
fn poly_golden_cubic_roots() {
    let out = gonchar(&["poly", "--kind", "A", "--d", "2", "--q", "1"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    let roots = v["results"]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 3);
    let re: Vec<f64> = roots.iter().map(|r| r["re"].as_f64().unwrap()).collect();
    assert!((re[0] + 1.0).abs() < 1e-12);
    assert!((re[2] - 2.618033988749895).abs() < 1e-12);
}

#[test]
fn poly_rational_charge_and_csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = gonchar(&[
        "poly",
        "--kind",
        "B",
        "--d",
        "6",
        "--q",
        "1/2",
        "--export",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    let file = v["results"]["files"][0].as_str().unwrap();
    let text = std::fs::read_to_string(file).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "re,im,residual");
    assert_eq!(lines.count(), 6); // degree d rows
}

#[test]
fn poly_svg_export_has_marker_per_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = gonchar(&[
        "poly",
        "--kind",
        "B",
        "--d",
        "12",
        "--q",
        "1",
        "--export",
        "svg",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    let file = v["results"]["files"][0].as_str().unwrap();
    let svg = std::fs::read_to_string(file).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("#c02020").count(), 12);
    assert_eq!(svg.matches("stroke-dasharray").count(), 3); // reference circles
}

#[test]
fn cap_solve_critical_height() {
    let out = gonchar(&[
        "cap",
        "--d",
        "2",
        "--s",
        "1",
        "--R",
        "2.6180339887",
        "--q",
        "-5",
        "--solve",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    let t = v["results"]["t"].as_f64().unwrap();
    assert!((-1.0..1.0).contains(&t));
    assert!(v["results"]["density_min"].as_f64().unwrap() >= -1e-9);
    assert_eq!(v["results"]["positive"], true);
}

#[test]
fn cap_exceptional_kernel() {
    let out = gonchar(&[
        "cap", "--d", "3", "--s", "1", "--R", "2", "--q", "-5", "--solve",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    let bc = v["results"]["boundary_charge"].as_f64().unwrap();
    assert!(bc.abs() < 1e-8);
}

#[test]
fn cap_weak_field_full_sphere() {
    let out = gonchar(&[
        "cap", "--d", "2", "--s", "1", "--R", "3", "--q", "-0.5", "--solve",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["results"]["t"].as_f64().unwrap(), 1.0);
}

#[test]
fn cap_fixed_height_diagnostics() {
    let out = gonchar(&[
        "cap",
        "--d",
        "2",
        "--s",
        "1",
        "--R",
        "2.6180339887",
        "--q",
        "-5",
        "--t",
        "0.5",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    // too large a cap: density dips negative near the rim
    assert_eq!(v["results"]["positive"], false);
}

#[test]
fn exit_codes() {
    // domain error -> 3
    let out = gonchar(&["potential", "--d", "3", "--s", "7", "--r", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("outside (0, 3)"));
    // usage error -> 2
    let out = gonchar(&["potential", "--d", "3"]);
    assert_eq!(out.status.code(), Some(2));
    // charge of the wrong sign for a family -> 3
    let out = gonchar(&["poly", "--kind", "A", "--d", "3", "--q", "-1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_byte_identical() {
    let a = gonchar(&["poly", "--kind", "C", "--d", "5", "--q", "-2"]);
    let b = gonchar(&["poly", "--kind", "C", "--d", "5", "--q", "-2"]);
    assert_eq!(a.stdout, b.stdout);
    let a = gonchar(&[
        "cap", "--d", "2", "--s", "1.3", "--R", "2", "--q", "-4", "--solve",
    ]);
    let b = gonchar(&[
        "cap", "--d", "2", "--s", "1.3", "--R", "2", "--q", "-4", "--solve",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_failure_injection() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    std::fs::write(&cfg, "closed_vs_quadrature = 1e-20\n").unwrap();
    let out = gonchar(&[
        "--config",
        cfg.to_str().unwrap(),
        "verify",
        "--level",
        "quick",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("failed criteria"));
    assert!(err.contains("closed form vs quadrature"));
    // the env variable is honored too
    let out = Command::new(env!("CARGO_BIN_EXE_gonchar"))
        .args(["verify", "--level", "quick"])
        .env("GONCHAR_CONFIG", cfg.to_str().unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_quick_passes() {
    let out = gonchar(&["verify", "--level", "quick"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert!(v["results"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}
