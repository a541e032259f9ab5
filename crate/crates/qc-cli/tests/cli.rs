use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qc")).args(args).env_remove("QC_SEED").output().expect("qc runs")
}

fn program(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("programs").join(name).display().to_string()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn check_prints_the_type() {
    let o = qc(&["check", &program("located.chor")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "int @ {B}");
}

#[test]
fn diagnostics_exit_one_with_positions() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.chor", "locations A\nmain = A.(1 + true)\n");
    let o = qc(&["check", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.chor:2:8: error[typing]"), "{}", stderr(&o));
    let g = write(&dir, "undeclared.chor", "locations A\nmain = A.1 ~> Q\n");
    let o = qc(&["check", &g]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[undeclared-location]"), "{}", stderr(&o));
}

#[test]
fn project_prints_both_ends() {
    let o = qc(&["project", "--all", &program("send.chor")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "A: send(ret(2 + 3), {B})\nB: recv(A)\n");
    let o = qc(&["project", "--loc", "B", &program("send.chor")]);
    assert_eq!(stdout(&o), "B: recv(A)\n");
}

#[test]
fn unmergeable_branches_exit_two() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "nosync.chor", "locations A, B\nmain = if A.true @ {A} then B.1 else B.2\n");
    let o = qc(&["project", "--all", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("B: merge-undefined"), "{}", stderr(&o));
}

#[test]
fn run_reaches_a_value() {
    let o = qc(&["run", &program("load_balancer.chor")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("value: C.42\n"), "{}", stdout(&o));
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn seeded_traces_replay_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    for t in [&a, &b] {
        let o = qc(&["simulate", &program("load_balancer.chor"), "--seed", "7", "--trace", t.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = read(&a);
    assert_eq!(text, read(&b));
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["step_index"], 0);
    assert!(first["label"]["kind"].is_string());
    assert!(first["changed_locations"].is_array());
    let comm = text.lines().map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()).find(|v| v["label"]["kind"] == "comm");
    let comm = comm.expect("a communication");
    assert_eq!(comm["label"]["sender"], "M");

    let (c, d) = (dir.path().join("c.jsonl"), dir.path().join("d.jsonl"));
    for t in [&c, &d] {
        qc(&["run", &program("if_sync.chor"), "--strategy", "random", "--seed", "3", "--trace", t.to_str().unwrap()]);
    }
    assert_eq!(read(&c), read(&d));
}

#[test]
fn explore_writes_a_graph() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.json");
    let o = qc(&["explore", &program("load_balancer.chor"), "--graph", g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("deadlocked: 0"));
    let v: serde_json::Value = serde_json::from_str(&read(&g)).unwrap();
    let nodes = v["nodes"].as_array().unwrap();
    assert!(nodes.iter().any(|n| n["kind"] == "all-values"));
    assert!(nodes.iter().all(|n| n["kind"] != "deadlocked"));
}

#[test]
fn conformance_reports_json() {
    let dir = TempDir::new().unwrap();
    let r = dir.path().join("r.json");
    let o = qc(&["conformance", "--suite", "statics", "--cases", "20", "--seed", "5", "--report", r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("statics: ok"));
    let v: serde_json::Value = serde_json::from_str(&read(&r)).unwrap();
    assert_eq!(v[0]["suite"], "statics");
    assert_eq!(v[0]["failures"].as_array().unwrap().len(), 0);
}
