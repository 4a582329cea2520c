//! End-to-end CLI tests: report values, JSON round-trips, seeded
//! determinism, and the exit-code contract.

use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::Command;

struct Output {
    code: i32,
    stdout: String,
}

fn run(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_doeblin"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
    }
}

fn write_json(name: &str, value: &Value) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("doeblin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn gad_file() -> PathBuf {
    write_json("gad.json", &json!({"kind": "gad", "p": 0.3, "eta": 0.25}))
}

#[test]
fn coeff_alpha_gad() {
    let path = gad_file();
    let out = run(&["coeff", "--channel", path.to_str().unwrap(), "--which", "alpha"]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert_eq!(v["name"], "alpha");
    assert_eq!(v["status"], "optimal");
    assert!((v["value"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    // Emitted JSON must reparse and re-serialize byte-identically.
    let reparsed: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert_eq!(doeblin::schema::to_json_string(&reparsed), out.stdout.trim());
}

#[test]
fn coeff_tensor_pbr_is_zero() {
    let pbr = write_json(
        "pbr.json",
        &json!({
            "kind": "cq",
            "states": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                [[[0.5, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.5, 0.0]]],
            ],
        }),
    );
    let out = run(&[
        "coeff",
        "--channel",
        pbr.to_str().unwrap(),
        "--which",
        "alpha",
        "--tensor",
        "2",
    ]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert!(v["value"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn coeff_all_reports_every_coefficient() {
    let path = gad_file();
    let out = run(&["coeff", "--channel", path.to_str().unwrap(), "--which", "all"]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    for name in [
        "alpha",
        "alpha_wang",
        "alpha_plus",
        "alpha_cone_ppt",
        "alpha_cone_ppt_sym2",
        "reverse",
    ] {
        assert!(v.get(name).is_some(), "missing {name}");
    }
    assert!((v["reverse"]["value"].as_f64().unwrap() - 0.75).abs() < 1e-6);
}

#[test]
fn coeff_selector_spellings() {
    let path = gad_file();
    for (selector, want) in [("alpha_wang", 0.25), ("alpha_plus", 0.2487), ("ppt_sym2", 0.5)] {
        let out = run(&["coeff", "--channel", path.to_str().unwrap(), "--which", selector]);
        assert_eq!(out.code, 0, "selector {selector}");
        let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
        assert!(
            (v["value"].as_f64().unwrap() - want).abs() < 1e-3,
            "selector {selector}: {}",
            v["value"]
        );
    }
}

#[test]
fn contraction_report_gad() {
    let path = gad_file();
    let out = run(&["contraction", "--channel", path.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert!((v["tr_upper_from_alpha"].as_f64().unwrap() - 0.75).abs() < 1e-6);
    assert!((v["tr_upper_from_cone"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((v["expansion_lower"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    assert!((v["qubit_exact"]["eta_tr"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!((v["qubit_exact"]["expansion"].as_f64().unwrap() - 0.25).abs() < 1e-9);
}

#[test]
fn coeff_tensor_cube_is_multiplicative() {
    // Middle-branch damping where alpha equals alpha_wang, so the tensor
    // power is exactly multiplicative.
    let path = write_json("gad_mid.json", &json!({"kind": "gad", "p": 0.5, "eta": 0.25}));
    let out = run(&[
        "coeff",
        "--channel",
        path.to_str().unwrap(),
        "--which",
        "alpha",
        "--tensor",
        "3",
    ]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.015625).abs() < 1e-6);
}

#[test]
fn bound_mixing_value() {
    let out = run(&["bound", "mixing", "--alpha", "0.25", "--delta", "0.01"]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert_eq!(v["value"].as_f64().unwrap(), 17.0);
}

#[test]
fn exclusion_pbr_pair() {
    let ensemble = write_json(
        "ensemble.json",
        &json!({
            "priors": [0.5, 0.5],
            "states": [
                [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
                [[[0.5, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.5, 0.0]]],
            ],
        }),
    );
    let out = run(&["exclusion", "--ensemble", ensemble.to_str().unwrap()]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    let want = (1.0 - std::f64::consts::FRAC_1_SQRT_2) / 2.0;
    assert!((v["value"].as_f64().unwrap() - want).abs() < 1e-6);
}

#[test]
fn simulate_mixing_gad_and_determinism() {
    let path = write_json("gad1.json", &json!({"kind": "gad", "p": 1.0, "eta": 0.25}));
    let args = [
        "simulate",
        "mixing",
        "--channel",
        path.to_str().unwrap(),
        "--delta",
        "0.01",
        "--samples",
        "0",
        "--seed",
        "7",
    ];
    let out = run(&args);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert_eq!(v["empirical"]["measured"].as_f64().unwrap(), 4.0);
    assert_eq!(v["empirical"]["bound_respected"], Value::Bool(true));
    assert_eq!(v["value"].as_f64().unwrap(), 17.0);
    // Identical seed, identical bytes.
    let again = run(&args);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn hypothesis_worked_values() {
    let gad = gad_file();
    let rho = write_json("rho.json", &json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]));
    let sigma = write_json("sigma.json", &json!([[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]));
    let out = run(&[
        "bound",
        "hypothesis",
        "--channel",
        gad.to_str().unwrap(),
        "--rho",
        rho.to_str().unwrap(),
        "--sigma",
        sigma.to_str().unwrap(),
        "--epsilon",
        "0.05",
        "--beta",
        "0.5",
    ]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert!((v["lower"].as_f64().unwrap() - 0.81).abs() < 1e-6);
    assert_eq!(v["upper"].as_f64().unwrap(), 74.0);
}

#[test]
fn table_format_is_aligned_text() {
    let path = gad_file();
    let out = run(&[
        "coeff",
        "--channel",
        path.to_str().unwrap(),
        "--which",
        "alpha",
        "--format",
        "table",
    ]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.lines().count() >= 4);
    assert!(out.stdout.contains("value"));
}

#[test]
fn exit_code_2_on_malformed_input() {
    // Unreadable file.
    let out = run(&["coeff", "--channel", "/nonexistent.json", "--which", "alpha"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());

    // Invalid JSON.
    let dir = std::env::temp_dir().join(format!("doeblin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    let out = run(&["coeff", "--channel", bad.to_str().unwrap(), "--which", "alpha"]);
    assert_eq!(out.code, 2);

    // Non-CPTP channel (incomplete Kraus set).
    let non_cptp = write_json(
        "noncptp.json",
        &json!({
            "kind": "kraus",
            "d_in": 2,
            "d_out": 2,
            "kraus": [[[[0.9, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.9, 0.0]]]],
        }),
    );
    let out = run(&["coeff", "--channel", non_cptp.to_str().unwrap(), "--which", "alpha"]);
    assert_eq!(out.code, 2);

    // Unknown subcommand and unknown flag.
    assert_eq!(run(&["nonsense"]).code, 2);
    assert_eq!(run(&["coeff", "--bogus-flag", "x"]).code, 2);

    // Out-of-range parameters.
    assert_eq!(
        run(&["bound", "mixing", "--alpha", "0.5", "--delta", "1.5"]).code,
        2
    );
}

#[test]
fn exit_code_1_on_numerical_failure() {
    // Near-unit damping: equatorial starts decay at sqrt(eta) per step and
    // cannot reach delta within the simulation cap.
    let path = write_json("slow.json", &json!({"kind": "gad", "p": 1.0, "eta": 0.9999}));
    let out = run(&[
        "simulate",
        "mixing",
        "--channel",
        path.to_str().unwrap(),
        "--delta",
        "0.0001",
        "--samples",
        "2",
        "--seed",
        "3",
    ]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
}
