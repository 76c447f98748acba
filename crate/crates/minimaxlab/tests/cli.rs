use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minimaxlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn powers(dir: &TempDir) -> PathBuf {
    let data: Vec<Vec<Vec<f64>>> = (0..100)
        .map(|n| (0..64).map(|z| vec![(0.9 * z as f64 / 63.0).powi(n + 1)]).collect())
        .collect();
    let doc = serde_json::json!({"kind": "sequence", "N": 100, "Z": 64, "d": 1, "data": data});
    write(dir, "powers.json", &doc.to_string())
}

const PENNIES: &str = r#"{"kind":"bimatrix","rows":2,"cols":2,"data":[[1,0],[0,1]]}"#;

#[test]
fn analyze_matching_pennies() {
    let dir = TempDir::new().unwrap();
    let mp = write(&dir, "mp.json", PENNIES);
    let out = run(&["--json", "analyze", "--input", p(&mp)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "analysis");
    assert!((v["values"]["gap"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["values"]["mixed"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    let text = v["convexity"].to_string();
    assert!(text.contains("infsup-convex"));
    assert_eq!(v["certificates_verified"], true);
}

#[test]
fn analyze_one_by_one() {
    let dir = TempDir::new().unwrap();
    let one = write(
        &dir,
        "one.json",
        r#"{"kind":"bimatrix","rows":1,"cols":1,"data":[[3.5]]}"#,
    );
    let out = run(&["--json", "analyze", "--input", p(&one)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["values"]["gap"].as_f64().unwrap(), 0.0);
    assert!((v["values"]["mixed"].as_f64().unwrap() - 3.5).abs() < 1e-9);
    let flags = v["convexity"].as_array().unwrap();
    assert!(!flags.is_empty());
    for flag in flags {
        assert_eq!(flag["holds"], true, "{flag}");
    }
}

#[test]
fn malformed_input_exits_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"kind":"bimatrix""#);
    let out = run(&["analyze", "--input", p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid JSON"));

    let ragged = write(
        &dir,
        "ragged.json",
        r#"{"kind":"bimatrix","rows":2,"cols":2,"data":[[1,0],[0]]}"#,
    );
    assert_eq!(run(&["game", "--input", p(&ragged)]).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(run(&["game", "--input", p(&missing)]).status.code(), Some(2));
    assert_eq!(run(&["game"]).status.code(), Some(2));
}

#[test]
fn wrong_kind_exits_two() {
    let dir = TempDir::new().unwrap();
    let mp = write(&dir, "mp.json", PENNIES);
    let out = run(&["alternative", "--input", p(&mp)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("mazur"));
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn game_value_of_pennies() {
    let dir = TempDir::new().unwrap();
    let mp = write(&dir, "mp.json", PENNIES);
    let out = run(&["--json", "game", "--input", p(&mp)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["solution"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["verified"], true);
}

#[test]
fn alternative_examples() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"[[-1,-2]]"#, 1, "A1"),
        (r#"[[1,-1],[-1,1]]"#, 2, "A2"),
        (r#"[[1,1]]"#, 1, "A2"),
    ];
    let mut outcomes = Vec::new();
    for (i, (members, generators, tag)) in cases.iter().enumerate() {
        let body = format!(r#"{{"kind":"family","generators":{generators},"points":2,"members":{members}}}"#);
        let path = write(&dir, &format!("fam{i}.json"), &body);
        let out = run(&["--json", "alternative", "--input", p(&path)]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert_eq!(v["result"]["outcome"]["tag"], *tag);
        assert_eq!(v["result"]["verified"], true);
        outcomes.push(v["result"]["outcome"].clone());
    }
    assert!((outcomes[0]["sup_value"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    for (w, want) in outcomes[1]["measure"].as_array().unwrap().iter().zip([0.5, 0.5]) {
        assert!((w.as_f64().unwrap() - want).abs() < 1e-9);
    }
    for (w, want) in outcomes[2]["measure"].as_array().unwrap().iter().zip([1.0, 0.0]) {
        assert!((w.as_f64().unwrap() - want).abs() < 1e-9);
    }
}

#[test]
fn mazur_powers_window() {
    let dir = TempDir::new().unwrap();
    let seq = powers(&dir);
    let out = run(&["--json", "mazur", "--input", p(&seq), "--tail", "1", "--window", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let norm = v["result"]["norm"].as_f64().unwrap();
    assert!((norm - 0.9f64.powi(100)).abs() <= 1e-9 * norm, "{norm}");
    assert_eq!(v["verified"], true);
}

#[test]
fn mazur_bad_window_exits_two() {
    let dir = TempDir::new().unwrap();
    let seq = powers(&dir);
    assert_eq!(
        run(&["mazur", "--input", p(&seq), "--tail", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["mazur", "--input", p(&seq), "--window", "101"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["mazur", "--input", p(&seq), "--tail", "5", "--window", "4"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn mazur_from_csv() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "alt.csv", "n,z,v1\n1,1,1\n1,2,-1\n2,1,-1\n2,2,1\n");
    let out = run(&["--json", "mazur", "--input", p(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["result"]["norm"].as_f64().unwrap().abs() < 1e-12);

    let dup = write(&dir, "dup.csv", "1,1,1\n1,1,2\n");
    assert_eq!(run(&["mazur", "--input", p(&dup)]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--seed", "1", "--kind", "km2_ready", "--shape", "6x5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["kind"], "infconv");
    assert_eq!(v["f"].as_array().unwrap().len(), 6);
}

#[test]
fn gen_manifest_feeds_analyze() {
    let dir = TempDir::new().unwrap();
    let out = run(&["gen", "--seed", "7", "--kind", "km2_ready", "--shape", "4x3"]);
    let path = write(&dir, "gen.json", &stdout(&out));
    let out = run(&["--json", "analyze", "--input", p(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["values"]["gap"].as_f64().unwrap().abs() < 1e-7);
}

#[test]
fn output_file_and_verify() {
    let dir = TempDir::new().unwrap();
    let mp = write(&dir, "mp.json", PENNIES);
    let cert = dir.path().join("cert.json");
    let out = run(&["--json", "--output", p(&cert), "game", "--input", p(&mp)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(cert.exists());

    let out = run(&["verify", "--input", p(&mp), "--certificate", p(&cert)]);
    assert_eq!(out.status.code(), Some(0));

    let other = write(
        &dir,
        "other.json",
        r#"{"kind":"bimatrix","rows":2,"cols":2,"data":[[2,0],[0,1]]}"#,
    );
    let out = run(&["verify", "--input", p(&other), "--certificate", p(&cert)]);
    assert_eq!(out.status.code(), Some(1));

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    doc["solution"]["row_weights"] = serde_json::json!([1.0, 0.0]);
    let tampered = write(&dir, "tampered.json", &doc.to_string());
    let out = run(&["verify", "--input", p(&mp), "--certificate", p(&tampered)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn construct_round_trips_through_analyze() {
    let dir = TempDir::new().unwrap();
    let g = write(
        &dir,
        "g.json",
        r#"{"kind":"bimatrix","rows":2,"cols":2,"data":[[0,3],[2,1]]}"#,
    );
    let out = run(&["construct", "--input", p(&g), "--xi", "0,1", "--k", "1", "--op", "inf"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = write(&dir, "inf.json", &stdout(&out));
    let out = run(&["--json", "analyze", "--input", p(&manifest)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tolerance_flags_validated() {
    let dir = TempDir::new().unwrap();
    let mp = write(&dir, "mp.json", PENNIES);
    assert_eq!(
        run(&["--tol-feas", "-1", "game", "--input", p(&mp)]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["--tol-opt", "nan", "game", "--input", p(&mp)]).status.code(),
        Some(2)
    );
}
