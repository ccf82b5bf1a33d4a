use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lapratio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lapratio"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn ratio_then_identify_recovers_sin() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    let h = h.to_str().unwrap();
    stdout(&lapratio(&[
        "ratio", "--builtin", "sin", "--n", "2", "--m", "1", "--order", "8", "--output", h,
    ]));
    let doc: Value =
        serde_json::from_str(&stdout(&lapratio(&["identify", "--input", h, "--n", "2", "--m", "1", "--target-degree", "5"])))
            .unwrap();
    let coeffs: Vec<&str> = doc["coeffs"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(coeffs, ["0", "1", "0", "-1/6", "0", "1/120"]);
    assert_eq!(doc["ambiguous_sign"], false);
    assert_eq!(doc["k"], 1);
}

#[test]
fn even_gap_flags_the_sign() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"kind":"poly","coeffs":["0","2","1"]}"#);
    let h = stdout(&lapratio(&["ratio", "--input", &f, "--n", "3", "--m", "1", "--order", "6"]));
    let h = write(dir.path(), "h.json", &h);
    let doc: Value = serde_json::from_str(&stdout(&lapratio(&[
        "identify", "--input", &h, "--n", "3", "--m", "1", "--target-degree", "2",
    ])))
    .unwrap();
    assert_eq!(doc["ambiguous_sign"], true);
    assert_eq!(doc["coeffs"], serde_json::json!(["0", "2", "1"]));
}

#[test]
fn exponential_auction_k() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "m.json",
        r#"{"common":{"kind":"lognormal","mu":0,"sigma":0.5},"idiosyncratic":{"kind":"exponential","theta":1},"N":5}"#,
    );
    let text = stdout(&lapratio(&["auction-k", "--model", &model, "--lambda", "1"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,k_quadrature,k_closed_form"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - 0.5).abs() < 1e-9, "{row:?}");
    assert_eq!(row[2], 0.5);
}

#[test]
fn simulation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "m.json",
        r#"{"common":{"kind":"exponential","theta":1},"idiosyncratic":{"kind":"lognormal","mu":0,"sigma":1},"N":3}"#,
    );
    let run = |chunk: &str| {
        stdout(&lapratio(&[
            "auction-sim", "--model", &model, "--samples", "1000", "--seed", "7", "--chunk", chunk,
        ]))
    };
    let a = run("100");
    assert_eq!(a, run("100"));
    assert_eq!(a.lines().count(), 1001);
    assert_eq!(a.lines().next(), Some("top,second"));

    // Saved samples read back give the same estimate as a fresh simulation.
    let saved = dir.path().join("s.csv");
    let saved = saved.to_str().unwrap();
    let fresh = stdout(&lapratio(&[
        "auction-sim", "--model", &model, "--samples", "1000", "--seed", "7", "--chunk", "100",
        "--lambda", "1", "--samples-out", saved,
    ]));
    let reread = stdout(&lapratio(&["auction-sim", "--input", saved, "--lambda", "1"]));
    assert_eq!(fresh, reread);
}

#[test]
fn verify_reports_sign_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"kind":"poly","coeffs":["1","1"]}"#);
    let g = write(dir.path(), "g.json", r#"{"kind":"poly","coeffs":["-1","-1"]}"#);
    let verdict = |n: &str| -> Value {
        serde_json::from_str(&stdout(&lapratio(&["verify", "--input", &f, "--input", &g, "--n", n, "--m", "1"])))
            .unwrap()
    };
    assert_eq!(verdict("3")["identical"], true);
    assert_eq!(verdict("2")["identical"], false);
}

#[test]
fn lambda_grid_table() {
    let text = stdout(&lapratio(&[
        "transform", "--builtin", "step_example", "--n-max", "4", "--lambda-grid", "0.1:10:5",
    ]));
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "lambda,L");
    assert_eq!(rows.len(), 6);
    assert!(rows[1].starts_with("0.1,"));
    assert!(rows[5].starts_with("10.0,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let missing = missing.to_str().unwrap();
    let code = |args: &[&str]| lapratio(args).status.code();

    assert_eq!(code(&["no-such-command"]), Some(2));
    assert_eq!(code(&["identify", "--input", missing, "--n", "2", "--m", "1", "--target-degree", "2"]), Some(2));
    assert_eq!(code(&["ratio", "--builtin", "sin", "--n", "2", "--m", "2"]), Some(2));
    assert_eq!(code(&["transform", "--builtin", "sin", "--lambda-grid", "1:2"]), Some(2));

    let bad = write(dir.path(), "bad.json", r#"{"kind":"poly","coeffs":[1,"x"]}"#);
    let out = lapratio(&["ratio", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.coeffs"));

    let zero = write(dir.path(), "zero.json", r#"{"kind":"poly","coeffs":["0"]}"#);
    assert_eq!(code(&["ratio", "--input", &zero]), Some(1));

    let short = write(dir.path(), "h.json", r#"{"lead":-1,"tail":["2","0","-6"]}"#);
    assert_eq!(code(&["identify", "--input", &short, "--n", "2", "--m", "1", "--target-degree", "5"]), Some(1));
}
