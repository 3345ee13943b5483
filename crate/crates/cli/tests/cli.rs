//! Exit codes and output of the `lff` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn corpus(id: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(id).join("problem.lff").display().to_string()
}

fn lff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lff")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn check_exit_codes() {
    let o = lff(&["check", &fixture("mary.lff")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "No errors found.\n");

    let o = lff(&["check", &fixture("ill-typed.lff")]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.starts_with("Input error on line 21:   had(Mary, SOME x lamb(x)).\nType mismatch with argument of had\n"),
        "{err}"
    );
    assert!(err.contains("    SOME x lamb(x)\nwhich is of type bool.\n"), "{err}");

    let o = lff(&["check", "/definitely/not/here.lff"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot read"));
}

#[test]
fn solve_exit_codes() {
    let o = lff(&["solve", &corpus("logic-games")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.matches("Model ").count(), 1);
    assert!(out.contains("result(Demons, Aces) = win"));
    assert!(out.contains("unique"));

    let o = lff(&["solve", &fixture("contradiction.lff")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("No solution found\n"));

    let o = lff(&["solve", &fixture("ill-typed.lff")]);
    assert_eq!(o.status.code(), Some(2));

    let o = lff(&["solve", &fixture("pigeons.lff"), "--timeout", "0.5"]);
    assert_eq!(o.status.code(), Some(3));

    let o = lff(&[
        "solve",
        &fixture("mary.lff"),
        "--bounds",
        "person=1..1,animal=1..1,place=1..1",
        "--max-models",
        "100",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["modelCount"], 21);
    assert_eq!(v["exhausted"], true);

    let o = lff(&["solve", &fixture("mary.lff"), "--max-models", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn max_size_limits_open_sorts() {
    let o = lff(&["solve", &fixture("contradiction.lff"), "--max-size", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Searched 2 domain size assignments"), "{}", stdout(&o));
}

#[test]
fn dimacs_export_resolves() {
    let dir = tempfile::tempdir().unwrap();
    for (file, sat) in
        [(corpus("logic-games"), true), (fixture("contradiction.lff"), false), (corpus("three-pets"), true)]
    {
        let out = dir.path().join("x.cnf");
        let o = lff(&["solve", &file, "--dimacs", out.to_str().unwrap()]);
        assert!(o.status.code().unwrap() <= 1);
        let cnf = lff_sat::parse_dimacs(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let r = lff_sat::solve(&cnf, &[], &lff_sat::Budget::unlimited());
        // The export is the first domain assignment, which for these files
        // decides the answer.
        assert_eq!(r.is_sat(), sat, "{file}");
    }
}

#[test]
fn diagnose_modes() {
    let o = lff(&["diagnose", &fixture("contradiction.lff")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("Minimal unsatisfiable set of 2 constraints"), "{out}");
    assert!(out.contains("line 6: ALL x p(x).") && !out.contains("q."), "{out}");

    let o = lff(&["diagnose", &fixture("contradiction.lff"), "--mode", "approx"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("2 of 3 constraints hold"), "{}", stdout(&o));

    let o = lff(&["diagnose", &fixture("mary.lff")]);
    assert_eq!(o.status.code(), Some(0));
    let o = lff(&["diagnose", &fixture("ill-typed.lff")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn corpus_commands() {
    let o = lff(&["corpus", "verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("PASS ").count(), 9);

    let o = lff(&["corpus", "list", "--level", "advanced"]);
    assert!(stdout(&o).contains("logic-games"));

    // A broken copy of the corpus fails.
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad");
    std::fs::create_dir(&p).unwrap();
    std::fs::write(p.join("meta"), "id: bad\ntitle: Bad\nlevel: Beginner\nexpected_models: 1\n").unwrap();
    std::fs::write(p.join("statement.txt"), "").unwrap();
    std::fs::write(
        p.join("problem.lff"),
        "Sorts:\n c enum: a, b.\nVocabulary:\n predicate { p(c). }\nConstraints:\n p(a).\n",
    )
    .unwrap();
    let o = lff(&["corpus", "verify", "--dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL bad"));
}

#[test]
fn stats_csv() {
    let o = lff(&["stats", &fixture("usage.jsonl")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "date,count\n2026-03-01,2\n2026-03-02,1\n");
    let o = lff(&["stats", &fixture("usage.jsonl"), "--by-day"]);
    assert_eq!(stdout(&o), "date,count\n2026-03-01,2\n2026-03-02,1\n");
    let o = lff(&["stats", &fixture("usage.jsonl"), "--intervals", "a"]);
    assert_eq!(
        stdout(&o),
        "timestamp,interval_secs,action,prev_action\n2026-03-01T10:00:00.000Z,,check,\n2026-03-01T10:00:12.500Z,12.500,solve,check\n"
    );
    let o = lff(&["stats", &fixture("mary.lff")]);
    assert_eq!(o.status.code(), Some(2));
}
