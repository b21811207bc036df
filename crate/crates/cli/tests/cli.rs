//! End-to-end runs of the `rsacomb` binary over the core fixture corpus.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(kind: &str, file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(kind).join(file)
}

fn rsacomb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsacomb")).args(args).env_remove("RSACOMB_DEPTH").output().expect("spawn rsacomb")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn check_rsa_fixture() {
    let out = rsacomb(&["check", path(&fixture("rsa", "fork.nha"))]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["is_rsa"], true);
}

#[test]
fn check_cycle_reports_witness() {
    let dot = tempfile::NamedTempFile::new().unwrap();
    let out = rsacomb(&["check", path(&fixture("cyclic", "two_cycle.nha")), "--dot", dot.path().to_str().unwrap()]);
    assert_eq!(code(&out), 10);
    let v = stdout_json(&out);
    assert_eq!(v["is_rsa"], false);
    assert_eq!(v["forest_violation"].as_array().unwrap().len(), 2);
    assert!(fs::read_to_string(dot.path()).unwrap().starts_with("digraph"));
}

#[test]
fn malformed_input_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.nha");
    fs::write(&bad, "@prefix : <http://ex.org/> .\nfact :A(:a) .\nsub-class :A -> .\n").unwrap();
    let out = rsacomb(&["check", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.nha:3:"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_file_is_an_input_error() {
    let out = rsacomb(&["check", "/nonexistent/o.nha"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&rsacomb(&[])), 1);
    assert_eq!(code(&rsacomb(&["answer", path(&fixture("rsa", "fork.nha"))])), 1);
    assert_eq!(code(&rsacomb(&["answer", "--mode", "fast", path(&fixture("rsa", "fork.nha")), path(&fixture("rsa", "fork.cq"))])), 1);
    assert_eq!(code(&rsacomb(&["--help"])), 0);
}

#[test]
fn approximate_rsa_input_is_identity() {
    let input = fixture("rsa", "university.nha");
    let a = rsacomb(&["approximate", path(&input)]);
    let b = rsacomb(&["approximate", path(&input)]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let again = tempfile::NamedTempFile::new().unwrap();
    fs::write(again.path(), &a.stdout).unwrap();
    let c = rsacomb(&["approximate", again.path().to_str().unwrap()]);
    assert_eq!(c.stdout, a.stdout);
}

#[test]
fn approximate_two_cycle_drops_one_existential() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("cyclic", "two_cycle.nha");
    let out = rsacomb(&["approximate", path(&input), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let written = dir.path().join("two_cycle.rsa.nha");
    let count = |text: &str| text.lines().filter(|l| l.starts_with("exists")).count();
    assert_eq!(count(&fs::read_to_string(&written).unwrap()) + 1, count(&fs::read_to_string(&input).unwrap()));
    let prov: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("two_cycle.provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["removed_t5"].as_array().unwrap().len(), 1);
    assert_eq!(code(&rsacomb(&["check", written.to_str().unwrap()])), 0);
}

#[test]
fn approximate_shifts_disjunctions() {
    let dir = tempfile::tempdir().unwrap();
    let out = rsacomb(&["approximate", path(&fixture("disj", "exclusion.nha")), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("exclusion.rsa.nha")).unwrap();
    assert!(!text.contains('|'), "{text}");
    let prov: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("exclusion.provenance.json")).unwrap()).unwrap();
    assert!(!prov["complements"].as_object().unwrap().is_empty());
    assert_eq!(prov["shifted"].as_array().unwrap().len(), 1);
}

#[test]
fn answer_writes_one_file_per_query_and_materializes_once() {
    let dir = tempfile::tempdir().unwrap();
    let out = rsacomb(&[
        "answer",
        path(&fixture("rsa", "university.nha")),
        path(&fixture("rsa", "university.cq")),
        "--stats",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(files.len() >= 3, "{files:?}");
    for f in &files {
        let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join(f)).unwrap()).unwrap();
        assert_eq!(v["exact"], true);
        assert_eq!(v["schema"], 1);
    }
    let stats: Value = serde_json::from_str(String::from_utf8(out.stderr).unwrap().lines().last().unwrap()).unwrap();
    assert_eq!(stats["canonical_materializations"], 1);
    assert_eq!(stats["queries"].as_u64().unwrap() as usize, files.len());
    assert_eq!(stats["baseline_facts"], stats["facts_after"]);
}

#[test]
fn fork_answers() {
    let out = rsacomb(&["answer", path(&fixture("rsa", "fork.nha")), path(&fixture("rsa", "fork.cq")), "--mode", "both"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let block: Vec<&str> = text.split("# ").nth(1).unwrap().lines().collect();
    assert_eq!(block, ["fork-1 exact=true", "x\tz", "<http://ex.org/a>\t<http://ex.org/a>", "<http://ex.org/b>\t<http://ex.org/b>"]);
}

#[test]
fn non_rsa_answers_are_lower_bounds() {
    let out = rsacomb(&["answer", path(&fixture("nonrsa", "diamond.nha")), path(&fixture("nonrsa", "diamond.cq")), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    for a in v["answers"].as_array().unwrap() {
        assert_eq!(a["exact"], false);
    }
    assert!(String::from_utf8(out.stderr).unwrap().contains("lower bound"));
}

#[test]
fn forced_approximation_of_rsa_input_stays_exact() {
    let out = rsacomb(&["answer", path(&fixture("rsa", "fork.nha")), path(&fixture("rsa", "fork.cq")), "--force-approximation", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["answers"][0]["exact"], true);
}

#[test]
fn unsatisfiable_exits_three_without_answers() {
    let out = rsacomb(&["answer", path(&fixture("rsa", "unsat_named.nha")), path(&fixture("rsa", "unsat_named.cq"))]);
    assert_eq!(code(&out), 3);
    assert!(out.stdout.is_empty());
}

#[test]
fn answering_is_byte_stable_and_parallel_safe() {
    let args = |extra: &[&'static str]| {
        let mut v = vec!["answer".to_string(), path(&fixture("rsa", "university.nha")).into(), path(&fixture("rsa", "university.cq")).into()];
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let run = |a: Vec<String>| rsacomb(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let a = run(args(&[]));
    let b = run(args(&[]));
    let c = run(args(&["--parallel", "3"]));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn depth_bound_must_be_positive() {
    let out = rsacomb(&["answer", path(&fixture("rsa", "fork.nha")), path(&fixture("rsa", "fork.cq")), "--depth", "0"]);
    assert_eq!(code(&out), 1);
    let out = Command::new(env!("CARGO_BIN_EXE_rsacomb"))
        .args(["oracle", path(&fixture("rsa", "fork.nha")), path(&fixture("rsa", "fork.cq"))])
        .env("RSACOMB_DEPTH", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn oracle_fork() {
    let out = rsacomb(&["oracle", path(&fixture("rsa", "fork.nha")), path(&fixture("rsa", "fork.cq")), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let first = &stdout_json(&out)["answers"][0];
    assert_eq!(first["exact"], true);
    assert_eq!(first["rows"], serde_json::json!([["http://ex.org/a", "http://ex.org/a"], ["http://ex.org/b", "http://ex.org/b"]]));
}

#[test]
fn oracle_depth_limit_warns() {
    let out = Command::new(env!("CARGO_BIN_EXE_rsacomb"))
        .args(["oracle", path(&fixture("cyclic", "self_loop.nha")), path(&fixture("cyclic", "self_loop.cq")), "--format", "json"])
        .env("RSACOMB_DEPTH", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact=false"));
    for a in stdout_json(&out)["answers"].as_array().unwrap() {
        assert_eq!(a["exact"], false);
    }
}

#[test]
fn oracle_without_queries_is_a_usage_error() {
    let empty = tempfile::NamedTempFile::new().unwrap();
    let out = rsacomb(&["oracle", path(&fixture("rsa", "fork.nha")), empty.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}
