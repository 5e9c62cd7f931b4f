use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moframe")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = run(&a);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn corpus_file(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("moframe-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn flat_equation_report() {
    let v = json(&["invariants", "--ode", "0", "--points", "3"]);
    let r = &v["results"][0];
    assert_eq!(r["verdict"], "linearizable");
    for p in r["report"]["points-used"].as_array().unwrap() {
        let f = &p["frame"]["fundamental"];
        assert_eq!((f["R_QQ"].as_str(), f["R_XPQ"].as_str(), f["R_XXQ"].as_str()), (Some("0"), Some("0"), Some("0")));
    }
    assert!(v["typo-ledger-version"].is_string());
    assert!(v["tool-version"].is_string());
}

#[test]
fn seeded_runs_repeat() {
    let a = run(&["invariants", "--ode", "q^2", "--points", "5", "--seed", "1", "--format", "json"]);
    let b = run(&["invariants", "--ode", "q^2", "--points", "5", "--seed", "1", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["results"][0]["verdict"], "not-linearizable");
    assert_eq!(v["results"][0]["report"]["points-used"][0]["frame"]["fundamental"]["R_QQ"], "2");
}

#[test]
fn transcendental_input_is_rejected() {
    let out = run(&["invariants", "--ode", "sin(x)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sin"));
}

#[test]
fn foreign_symbol_is_an_input_error() {
    assert_eq!(run(&["invariants", "--ode", "r"]).status.code(), Some(2));
}

#[test]
fn classify_corpus() {
    let p = corpus_file("c.txt", "flat: 0\nshift: 6\nw: q^2\n");
    let v = json(&["classify", "--corpus", p.to_str().unwrap(), "--points", "3"]);
    let rows = v["results"]["rows"].as_array().unwrap();
    let verdicts: Vec<&str> = rows.iter().map(|r| r["verdict"].as_str().unwrap()).collect();
    assert_eq!(verdicts, ["linearizable", "linearizable", "not-linearizable"]);
    assert_eq!(v["results"]["summary"]["linearizable"], 2);
}

#[test]
fn empty_corpus_is_an_empty_table() {
    let p = corpus_file("empty.txt", "# nothing\n\n");
    let out = run(&["classify", "--corpus", p.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&["classify", "--corpus", p.to_str().unwrap()]);
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 0);
}

#[test]
fn bad_corpus_line_is_an_input_error() {
    let p = corpus_file("bad.txt", "ok: 0\nbroken q^2\n");
    let out = run(&["classify", "--corpus", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn tiny_budget_exits_with_three() {
    let out = run(&["invariants", "--ode", "q^3*p/(x+u) + u^2*q", "--mode", "symbolic", "--budget", "3"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn symbolic_mode_is_exact() {
    let v = json(&["invariants", "--ode", "q^2", "--mode", "symbolic"]);
    let s = &v["results"][0]["symbolic"];
    assert_eq!(s["R_QQ"], "2");
    assert_eq!(s["R_XXQ"], "-4/9*q^3");
}

#[test]
fn structure_suite_passes() {
    let out = run(&["verify", "--suite", "structure"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("PASS structure/").count(), 4);
    assert!(text.contains("absorbed: "));
}

#[test]
fn group_law_suite() {
    let v = json(&["verify", "--suite", "group-law", "--seed", "7"]);
    let s = &v["suite-residuals"][0];
    assert_eq!(s["pass"], true);
    assert_eq!(s["details"]["exact"], 625);
}

#[test]
fn determining_suite() {
    let v = json(&["verify", "--suite", "determining"]);
    for r in v["suite-residuals"][0]["details"]["prolongation"].as_array().unwrap() {
        assert_eq!(r["residual"], "0");
    }
}

#[test]
fn equivalence_by_branch_and_by_hint() {
    let v = json(&["equivalent", "--ode", "0", "--ode", "q^2", "--points", "3"]);
    assert_eq!(v["results"]["report"]["signature"], "necessarily-inequivalent");
    let v = json(&["equivalent", "--ode", "0", "--ode", "6", "--hint-xi", "x", "--hint-phi", "u+x^3", "--points", "5"]);
    assert_eq!(v["results"]["report"]["signature"], "verified-by-hint");
}

#[test]
fn latex_table() {
    let out = run(&["classify", "--ode", "w: q^2", "--points", "2", "--format", "latex"]);
    let t = String::from_utf8_lossy(&out.stdout);
    assert!(t.starts_with("\\begin{tabular}"));
    assert!(t.contains("$q^2$ & not-linearizable"));
}
