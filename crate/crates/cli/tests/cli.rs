//! End-to-end tests of the command-line contract: exit codes 0/1/2/3,
//! byte-reproducible JSON reports, and the model-file round trip.

use std::io::Write;
use std::process::{Command, Output};

fn geosym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geosym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("geosym-test-{}-{name}", std::process::id()));
    let mut f = std::fs::File::create(&path).expect("temp file");
    f.write_all(contents.as_bytes()).expect("write");
    path
}

const PLANE_MODEL: &str = r#"{
  "chart": ["x", "y"],
  "metric": [["1", "0"], ["0", "1"]],
  "vector_fields": {
    "dilation": { "x": "x", "y": "y" },
    "slide": { "x": "1", "y": "0" }
  },
  "potential": "x^(-2)*f(y/x)",
  "opaque": { "f": { "arity": 1, "default": "s^2" } }
}"#;

#[test]
fn exit_zero_when_all_checks_pass() {
    let out = geosym(&["tables", "verify", "--table", "1"]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("summary: 8 zero"));
}

#[test]
fn exit_one_on_provable_failure() {
    let path = write_temp("plane.json", PLANE_MODEL);
    let out = geosym(&[
        "check-kg",
        "--model",
        path.to_str().unwrap(),
        "--vector",
        "slide",
        "--potential",
        "x",
    ]);
    assert_eq!(out.status.code(), Some(1), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("nonzero"));
    assert!(text.contains("witness"));
}

#[test]
fn exit_two_on_schema_error() {
    let path = write_temp("broken.json", r#"{ "chart": ["x"] }"#);
    let out = geosym(&["curvature", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);

    // and on an uninstantiated arbitrary function
    let out = geosym(&[
        "check-kg",
        "--model",
        "euclid2",
        "--vector",
        "dilation",
        "--potential",
        "x^(-2)*g(y/x)",
    ]);
    assert_eq!(out.status.code(), Some(2), "{:?}", out);
}

#[test]
fn exit_three_on_inconclusive() {
    let path = write_temp("inconclusive.json", PLANE_MODEL);
    let out = geosym(&[
        "check-kg",
        "--model",
        path.to_str().unwrap(),
        "--vector",
        "dilation",
        "--potential",
        "ln(x - 10)",
    ]);
    assert_eq!(out.status.code(), Some(3), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("inconclusive"));
}

#[test]
fn reports_are_byte_reproducible() {
    let args = [
        "tables",
        "verify",
        "--table",
        "2",
        "--json",
        "--no-timings",
        "--seed",
        "7",
    ];
    let first = geosym(&args);
    let second = geosym(&args);
    assert_eq!(first.status.code(), second.status.code());
    assert_eq!(first.stdout, second.stdout, "reports must be identical");
    // the flagged linear-combination row is reported skipped
    let text = String::from_utf8_lossy(&first.stdout);
    assert!(text.contains("\"verdict\": \"skipped\""));
    assert!(text.contains("\"schema_version\": 1"));
}

#[test]
fn classify_matches_catalog_knowledge() {
    let out = geosym(&["classify", "--model", "minisuperspace", "--vector", "X2", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("proper-conformal"));
}

#[test]
fn drift_scenario_runs() {
    let out = geosym(&["drift", "--scenario", "scenario.oscillator", "--quiet"]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("summary: 4 zero"));
}

#[test]
fn verify_solution_families() {
    for id in ["solution.sc02.bessel1", "solution.sc02.bessel2", "solution.m2a.closed"] {
        let out = geosym(&["verify-solution", "--scenario", id, "--quiet"]);
        assert_eq!(out.status.code(), Some(0), "{id}: {:?}", out);
    }
}

#[test]
fn discover_kv_dimensions() {
    let out = geosym(&[
        "discover-kv",
        "--model",
        "metric.euclid3.cartesian",
        "--degree",
        "1",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"dimension\": 6"));
}

#[test]
fn export_round_trips_through_model_files() {
    let out = geosym(&[
        "catalog",
        "export",
        "metric.minisuperspace.sc01a",
        "--json",
        "--no-timings",
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("report is JSON");
    let model = &report["data"]["model"];
    let path = write_temp("exported.json", &serde_json::to_string(model).unwrap());
    let out = geosym(&[
        "classify",
        "--model",
        path.to_str().unwrap(),
        "--vector",
        "x2",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("proper-conformal"));
}

#[test]
fn catalog_list_enumerates() {
    let out = geosym(&["catalog", "list", "--json", "--no-timings"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = report["data"]["entries"].as_array().unwrap();
    assert!(entries.len() > 40);
}

#[test]
fn noether_check_via_cli() {
    let out = geosym(&[
        "check-noether",
        "--model",
        "lagrangian.minisuperspace.sc01",
        "--xi",
        "2*tau",
        "--eta",
        "h",
        "--gauge",
        "0",
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
}
