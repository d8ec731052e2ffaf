//! Exit codes and outputs of the `spectral-limits` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::{Arc, OnceLock};

use tempfile::TempDir;

use spectral_limits::algebra::FiniteCStarAlgebra;
use spectral_limits::generators::{ci_system, matrix_chain};
use spectral_limits::inductive::{InductiveSystem, Provenance};
use spectral_limits::operator::{ComplexMatrix, HermitianOperator};
use spectral_limits::triple::{FiniteSpectralTriple, Representation};
use spectral_limits::Tolerances;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral-limits")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    static DIR: OnceLock<TempDir> = OnceLock::new();
    DIR.get_or_init(|| TempDir::new().unwrap()).path().join(name)
}

fn write(name: &str, text: &str) -> PathBuf {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Builds a system file from a config and returns its path.
fn build(name: &str, config: &str) -> PathBuf {
    let cfg = write(&format!("{name}.config.json"), config);
    let sys = scratch(&format!("{name}.system.json"));
    let out = run(&["build", "--config", s(&cfg), "--out", s(&sys)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    sys
}

fn cantor(levels: usize) -> PathBuf {
    build(&format!("cantor{levels}"), &format!(r#"{{"type": "cantor", "gaps": "middle-thirds", "levels": {levels}}}"#))
}

fn verdict(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(format!("{}.verdict.json", path.display())).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn build_rejects_real_lambda() {
    let cfg = write(
        "real.json",
        r#"{"type": "cantor", "gaps": "middle-thirds", "levels": 2, "probes": {"lambdas": [{"re": 2, "im": 0}]}}"#,
    );
    let out = run(&["build", "--config", s(&cfg), "--out", s(&scratch("real.system.json"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn validate_accepts_and_rejects() {
    let sys = cantor(3);
    let out = run(&["validate", "--system", s(&sys)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&sys).unwrap()).unwrap();
    json["links"][1]["iso"]["data"][0]["re"] = serde_json::json!(0.5);
    let broken = write("broken.system.json", &json.to_string());
    let out = run(&["validate", "--system", s(&broken)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("link 1"), "{}", stderr(&out));

    let text = std::fs::read_to_string(&sys).unwrap();
    let truncated = write("truncated.system.json", &text[..text.len() / 2]);
    assert_eq!(code(&run(&["validate", "--system", s(&truncated)])), 2);
}

#[test]
fn st1_cantor_is_consistent() {
    let sys = cantor(6);
    let csv = scratch("cantor.st1.csv");
    let out = run(&["st1", "--system", s(&sys), "--lambda", "i", "--out", s(&csv)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("kind,j,lambda_re,lambda_im,f_name,gap,analytic_bound,cross_check"));
    assert_eq!(text.lines().count(), 1 + 7);
    assert_eq!(verdict(&csv)[0]["classification"], "consistent");
}

#[test]
fn st1_alternating_alphas_are_inconsistent() {
    let sys = build(
        "alternating",
        r#"{"type": "christensen-ivan", "chain": "binary", "alphas": {"rule": "alternating"}, "levels": 6}"#,
    );
    let csv = scratch("alternating.st1.csv");
    let out = run(&["st1", "--system", s(&sys), "--lambda", "i", "--threshold", "1e-3", "--out", s(&csv)]);
    assert_eq!(code(&out), 1);
    assert_eq!(verdict(&csv)[0]["classification"], "inconsistent");
}

#[test]
fn st2_outcomes() {
    let out = run(&["st2", "--system", s(&cantor(5))]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let sys = build("growth", r#"{"type": "linear-growth", "levels": 6}"#);
    let json = scratch("growth.st2.json");
    let out = run(&["st2", "--system", s(&sys), "--element", "0:0", "--format", "json", "--out", s(&json)]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["verdict"]["classification"], "inconsistent");
}

#[test]
fn distance_outputs() {
    let sys = cantor(2);
    let out = run(&["distance", "--system", s(&sys), "--level", "1", "--x", "0", "--y", "2/3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let first = stdout(&out).lines().next().unwrap().to_string();
    let value: f64 = first.strip_prefix("distance,").unwrap().parse().unwrap();
    assert!((value - 1.0 / 3.0).abs() <= 1e-12);
    assert_eq!(code(&run(&["distance", "--system", s(&sys), "--level", "1", "--x", "1/2", "--y", "0"])), 2);
}

#[test]
fn distance_between_disconnected_points_is_infinite() {
    let tol = Tolerances::default();
    let t = FiniteSpectralTriple::new(
        FiniteCStarAlgebra::commutative(2).unwrap(),
        Representation::Diagonal { labels: vec![0, 1] },
        HermitianOperator::new(ComplexMatrix::zeros(2, 2), &tol).unwrap(),
        None,
    )
    .unwrap();
    let system = InductiveSystem::new(vec![Arc::new(t)], vec![], Provenance::Custom).unwrap();
    let sys = write("disconnected.system.json", &serde_json::to_string(&system).unwrap());
    let out = run(&["distance", "--system", s(&sys), "--level", "0", "--x", "0", "--y", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).starts_with("distance,infinite"));
}

#[test]
fn distance_on_matrix_algebra_is_an_input_error() {
    let system = ci_system(&matrix_chain(2.0).unwrap(), 1, &Tolerances::default()).unwrap();
    let sys = write("m2.system.json", &serde_json::to_string(&system).unwrap());
    let out = run(&["distance", "--system", s(&sys), "--level", "1", "--x", "0", "--y", "1"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn report_is_deterministic() {
    let cfg = write(
        "report.config.json",
        r#"{"type": "christensen-ivan", "chain": "binary", "alphas": {"rule": "linear"}, "levels": 7}"#,
    );
    let (a, b) = (scratch("report.a.json"), scratch("report.b.json"));
    assert_eq!(code(&run(&["report", "--config", s(&cfg), "--out", s(&a)])), 0);
    assert_eq!(code(&run(&["report", "--config", s(&cfg), "--out", s(&b)])), 0);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let json: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(json["system"]["dims"].as_array().unwrap().len(), 8);
    assert!(json["validation"].is_object());
}
