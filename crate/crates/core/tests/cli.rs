use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hofix_core::engine::{verify_report_json, ReportJson};
use hofix_core::mediator::{verify_mediator_json, MediatorJson};
use tempfile::TempDir;

fn hofix(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hofix")).current_dir(dir).args(args).output().expect("spawn hofix")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report on stdout")
}

const OUTPUTS: &str = r#"{"values":["a","b","c","d"],"states":["a","b","c","d"],
  "behaviour":{"a":{"output":"a"},"b":{"output":"b"},"c":{"output":"c"},"d":{"output":"d"}}}"#;

#[test]
fn solve_det_family() {
    let d = TempDir::new().unwrap();
    write(d.path(), "det.expr", "(V -!> Id) + W\n");
    let out = hofix(d.path(), &["solve", "-f", "det.expr", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(0));
    let j: ReportJson = serde_json::from_str(&fs::read_to_string(d.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(j.z_size, 1);
    verify_report_json(&j).unwrap();
}

#[test]
fn solve_upsets_is_truncated() {
    let d = TempDir::new().unwrap();
    write(d.path(), "u.expr", "U(Id)");
    let out = hofix(d.path(), &["solve", "-f", "u.expr"]);
    assert_eq!(out.status.code(), Some(2));
    let j = json(&out);
    assert_eq!(j["chain"]["rows"][0]["stages"].as_array().unwrap().len(), 9);
}

#[test]
fn missing_file_is_an_input_error() {
    let d = TempDir::new().unwrap();
    let out = hofix(d.path(), &["solve", "-f", "nope.expr"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "IoError");
    assert!(err["message"].as_str().unwrap().contains("nope.expr"));
}

#[test]
fn syntax_and_usage_errors() {
    let d = TempDir::new().unwrap();
    write(d.path(), "bad.expr", "Id +");
    let out = hofix(d.path(), &["solve", "-f", "bad.expr"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "SyntaxError");
    let out = hofix(d.path(), &["solve", "--inner-budget", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn terminal_of_strict_upsets() {
    let d = TempDir::new().unwrap();
    write(d.path(), "us.expr", "Us(Id)");
    let out = hofix(d.path(), &["terminal", "-f", "us.expr"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["status"]["stabilized"], 0);
    assert_eq!(j["lambek"], true);
}

#[test]
fn bisim_of_outputs_is_identity() {
    let d = TempDir::new().unwrap();
    write(d.path(), "o.json", OUTPUTS);
    let out = hofix(d.path(), &["bisim", "--lts", "o.json", "--lts", "o.json"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    let pairs: Vec<(String, String)> = serde_json::from_value(j["relation"]["pairs"].clone()).unwrap();
    let expected: Vec<(String, String)> = ["a", "b", "c", "d"].iter().map(|s| (s.to_string(), s.to_string())).collect();
    assert_eq!(pairs, expected);
}

#[test]
fn dimmed_and_quotient() {
    let d = TempDir::new().unwrap();
    write(d.path(), "o.json", OUTPUTS);
    write(d.path(), "eq.json", r#"{"blocks":[["a","b"],["c","d"]]}"#);
    let out = hofix(d.path(), &["dimmed", "--lts", "o.json", "--approx", "eq.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["size"], 8);
    let out = hofix(d.path(), &["quotient", "--lts", "o.json", "--approx", "eq.json"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["carrier"]["elements"].as_array().unwrap().len(), 2);
    // A relation that is not a ≈-bisimulation is refused.
    write(d.path(), "r.json", r#"{"blocks":[["a","c"],["b"],["d"]]}"#);
    let out = hofix(d.path(), &["quotient", "--lts", "o.json", "--approx", "eq.json", "--relation", "r.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "NotABisimulation");
}

#[test]
fn lemma1_on_a_tiny_system() {
    let d = TempDir::new().unwrap();
    write(
        d.path(),
        "tiny.json",
        r#"{"values":["p","q"],"states":["x","y"],"behaviour":{"x":{"input":{"p":"y","q":"x"}},"y":{"output":"q"}}}"#,
    );
    write(d.path(), "eq.json", r#"{"blocks":[["p","q"]]}"#);
    let out = hofix(d.path(), &["lemma1", "--lts", "tiny.json", "--approx", "eq.json", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["holds"], true);
    assert_eq!(j["relations_checked"], 16);
}

#[test]
fn lemma1_rejects_large_exhaustive_runs() {
    let d = TempDir::new().unwrap();
    write(d.path(), "o.json", OUTPUTS);
    let out = hofix(d.path(), &["lemma1", "--lts", "o.json", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mediator_lazy_inputs() {
    let d = TempDir::new().unwrap();
    write(d.path(), "lazy.expr", "Lift((V -> Id) + W)");
    let out = hofix(d.path(), &["mediator", "-f", "lazy.expr", "--inner-budget", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let j: MediatorJson = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(j.sizes_h, vec![1, 3, 5, 7, 9]);
    assert!(j.agrees);
    verify_mediator_json(&j).unwrap();
}

#[test]
fn render_writes_stage_files() {
    let d = TempDir::new().unwrap();
    write(d.path(), "det.expr", "(V -!> Id) + W");
    let out = hofix(d.path(), &["solve", "-f", "det.expr", "--out", "r.json", "--render"]);
    assert_eq!(out.status.code(), Some(0));
    let dot = fs::read_to_string(d.path().join("stage_0_0.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    let out = hofix(d.path(), &["render", "-f", "det.expr", "--out", "dots"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(d.path().join("dots/stage_1_1.dot").exists());
}

#[test]
fn reports_are_byte_identical() {
    let d = TempDir::new().unwrap();
    write(d.path(), "a.expr", "(V -!> Id) + W + A");
    write(d.path(), "c.json", r#"{"A":{"elements":["bot","a","b"],"leq":[["bot","a"],["bot","b"]],"bottom":"bot"}}"#);
    let a = hofix(d.path(), &["solve", "-f", "a.expr", "--constants", "c.json"]);
    let b = hofix(d.path(), &["solve", "-f", "a.expr", "--constants", "c.json"]);
    assert_eq!(a.status.code(), Some(2));
    assert_eq!(a.stdout, b.stdout);
    let j: ReportJson = serde_json::from_slice(&a.stdout).unwrap();
    verify_report_json(&j).unwrap();
}
