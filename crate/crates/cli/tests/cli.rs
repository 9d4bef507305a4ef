use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

const SIGMA: &str = "sys: a b; env: c d;";
const W: &str = "procs sys=1,2,3 env=4,5 both=6,7,8; (a,1)(b,8)(d,7)(c,4)(a,6)(c,6)(a,7)(d,6)(b,2)(d,7)(a,7)";
const PHI1: &str = "A x. ((s(x) | se(x)) -> E y. (x ~ y & (a(y) | b(y))))";
const PHI2: &str = "A x. (d(x) -> E y. (x ~ y & a(y)))";
const PHI4: &str = "A x. ((E==2 y. (x ~ y & a(y))) <-> (E==2 y. (x ~ y & d(y))))";
const M1: &str = "states q0 qh; init q0; halt qh; t1: q0 --c1==0--> qh;";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }

    fn token(&self) -> &str {
        self.stdout.trim()
    }
}

fn pvg_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pvg"));
    cmd.args(args).env_remove("PVG_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn pvg(args: &[&str]) -> Run {
    pvg_env(args, &[])
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn formula(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    file(dir, name, &format!("{SIGMA}\n{body}\n"))
}

#[test]
fn check_evaluates_sentences_on_executions() {
    let dir = TempDir::new().unwrap();
    let w = file(&dir, "w.txt", W);
    let (f1, f2) = (formula(&dir, "p1.fo", PHI1), formula(&dir, "p2.fo", PHI2));
    assert_eq!(pvg(&["check", s(&f2), s(&w), "--quiet"]).token(), "true");
    let r = pvg(&["check", s(&f1), s(&w)]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["result"]["value"], false);
    assert_eq!(r.json()["command"], "check");
}

#[test]
fn malformed_inputs_exit_with_code_2() {
    let dir = TempDir::new().unwrap();
    let w = file(&dir, "w.txt", W);
    let bad = file(&dir, "bad.fo", "sys: a; env: b;\nA x. (a(x) &");
    let r = pvg(&["check", s(&bad), s(&w)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bad.fo"));
    let game = file(&dir, "g.json", "{\"B\": 2}");
    assert_eq!(pvg(&["solve", s(&game)]).code, 2);
    assert_eq!(pvg(&["solve", "builtin:nope"]).code, 2);
    assert_eq!(pvg(&["scan", "builtin:parity", "--axis", "x", "--to", "2"]).code, 2);
    assert_eq!(pvg(&["frobnicate"]).code, 2);
}

#[test]
fn normalize_reproduces_the_hand_written_normal_form() {
    let dir = TempDir::new().unwrap();
    let f = formula(&dir, "p4.fo", PHI4);
    let r = pvg(&["normalize", s(&f), "--B", "3", "--mcap", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let clauses = r.json()["result"]["normal_form"]["clauses"].as_array().unwrap().clone();
    assert_eq!(clauses.len(), 1);
    // No token of any type where exactly one of a, d occurs twice:
    // 6 (a, d) pairs, 16 (b, c) pairs, 3 types.
    let clause = clauses[0].as_array().unwrap();
    assert_eq!(clause.len(), 6 * 16 * 3);
    for k in clause {
        let (a, d) = (k["loc"]["a"].as_u64().unwrap(), k["loc"]["d"].as_u64().unwrap());
        assert!((a == 2) != (d == 2));
        assert_eq!((k["cmp"].as_str(), k["m"].as_u64()), (Some("="), Some(0)));
    }
}

#[test]
fn normalize_true_and_budget_refusal() {
    let dir = TempDir::new().unwrap();
    let t = file(&dir, "t.fo", "sys: a; env: b;\ntrue\n");
    let r = pvg(&["normalize", s(&t)]);
    assert_eq!(r.json()["result"]["normal_form"]["clauses"], serde_json::json!([[]]));
    let big = file(
        &dir,
        "big.fo",
        "sys: a1 a2 a3 a4 a5 a6 a7 a8; env: b1 b2 b3 b4 b5 b6 b7 b8;\nA x. a1(x)\n",
    );
    assert_eq!(pvg(&["normalize", s(&big), "--B", "9", "--budget", "1000"]).code, 3);
}

#[test]
fn sat_reports_witnesses_and_unsat() {
    let dir = TempDir::new().unwrap();
    let contra = file(&dir, "c.fo", "sys: a; env: b;\nE x. (a(x) & !a(x))\n");
    assert_eq!(pvg(&["sat", s(&contra), "--quiet"]).token(), "unsat");
    let f = formula(&dir, "p.fo", "E x. (d(x) & E y. (x ~ y & a(y)))");
    let r = pvg(&["sat", s(&f)]);
    assert_eq!(r.json()["result"]["sat"], true);
    let w = file(&dir, "w.txt", r.json()["result"]["witness"].as_str().unwrap());
    assert_eq!(pvg(&["check", s(&f), s(&w), "--quiet"]).token(), "true");
}

#[test]
fn solve_parity_and_inconclusive_budgets() {
    assert_eq!(pvg(&["solve", "builtin:parity", "--kse", "2", "--quiet"]).token(), "System");
    assert_eq!(pvg(&["solve", "builtin:parity", "--kse", "3", "--quiet"]).token(), "Environment");
    let r = pvg(&["solve", "builtin:parity", "--kse", "8", "--budget", "5"]);
    assert_eq!(r.code, 4);
    assert_eq!(r.json()["result"]["winner"], "inconclusive");
    let r = pvg_env(&["solve", "builtin:parity", "--kse", "8"], &[("PVG_BUDGET", "5")]);
    assert_eq!(r.code, 4);
}

#[test]
fn capped_solving_is_labelled() {
    let r = pvg(&["solve", "builtin:matching", "--ks", "1", "--ke", "1", "--caps-tokens", "2"]);
    assert_eq!(r.json()["result"]["semantics"], "capped semantics");
}

#[test]
fn emitted_strategies_verify() {
    let dir = TempDir::new().unwrap();
    let r = pvg(&["solve", "builtin:matching", "--ks", "2", "--ke", "1", "--emit-strategy"]);
    let strat = file(&dir, "s.json", &r.json()["result"]["strategy"].to_string());
    let r = pvg(&["verify", "builtin:matching", "--strategy", s(&strat), "--ks", "2", "--ke", "1", "--quiet"]);
    assert_eq!(r.token(), "true");
    let r = pvg(&["verify", "builtin:zone", "--strategy", "builtin:zone", "--kse", "6", "--quiet"]);
    assert_eq!(r.token(), "true");
}

#[test]
fn decide_formulas_and_games() {
    let dir = TempDir::new().unwrap();
    let f = formula(&dir, "p4.fo", PHI4);
    let r = pvg(&["decide", s(&f)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["result"]["witness"], 0);
    let r = pvg(&["decide", "builtin:zone", "--ke", "1"]);
    assert_eq!(r.json()["result"]["result"], "empty");
    let r = pvg(&["decide", "builtin:parity", "--kse", "1", "--budget", "3"]);
    assert_eq!(r.code, 4);
    assert_eq!(r.json()["result"]["result"], "inconclusive");
    assert_eq!(r.json()["result"]["hatN"], "1458");
}

#[test]
fn scan_parity_alternates() {
    let r = pvg(&["scan", "builtin:parity", "--axis", "se", "--to", "8", "--quiet"]);
    assert_eq!(r.token(), "LLWLWLWLW");
    let r = pvg(&["scan", "builtin:parity", "--axis", "se", "--to", "8", "--jobs", "3"]);
    assert_eq!(r.json()["result"]["entries"].as_array().unwrap().len(), 9);
}

#[test]
fn encoded_machine_strategy_verifies() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m1.tcm", M1);
    let g = dir.path().join("m1.json");
    assert_eq!(pvg(&["encode-2cm", s(&m), "--out", s(&g), "--quiet"]).token(), "ok");
    let tcm = format!("tcm:{}", s(&m));
    let r = pvg(&["verify", s(&g), "--strategy", &tcm, "--kse", "4", "--quiet"]);
    assert_eq!(r.token(), "true");
    let r = pvg(&["verify", s(&g), "--strategy", &tcm, "--kse", "1"]);
    assert_eq!(r.json()["result"]["ok"], false);
    assert!(r.json()["result"]["counterexample"].is_object());
}

#[test]
fn compile_and_invert_preserve_winners() {
    let dir = TempDir::new().unwrap();
    let inv = pvg(&["invert", "builtin:matching"]);
    assert_eq!(inv.code, 0);
    let f = file(&dir, "inv.fo", &inv.stdout);
    let g = dir.path().join("g.json");
    assert_eq!(pvg(&["compile", s(&f), "--out", s(&g), "--quiet"]).code, 0);
    for (ks, ke) in [("0", "0"), ("1", "1"), ("1", "2"), ("2", "1")] {
        let a = pvg(&["solve", s(&g), "--ks", ks, "--ke", ke, "--quiet"]);
        let b = pvg(&["solve", "builtin:matching", "--ks", ks, "--ke", ke, "--quiet"]);
        assert_eq!(a.token(), b.token(), "at ({ks}, {ke})");
    }
}

#[test]
fn simulate_translates_both_ways() {
    let dir = TempDir::new().unwrap();
    let r = pvg(&["simulate", "builtin:zone", "--kse", "3", "--seed", "4", "--steps", "4"]);
    let play = file(&dir, "play.json", &r.json()["result"]["play"].to_string());
    let x = r.json()["result"]["execution"].as_str().unwrap().to_string();
    assert_eq!(pvg(&["simulate", "builtin:zone", "--play", s(&play), "--quiet"]).token(), x);
    let w = file(&dir, "w.txt", &x);
    let back = pvg(&["simulate", "builtin:zone", "--execution", s(&w)]);
    assert_eq!(back.json()["result"]["play"], r.json()["result"]["play"]);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["solve", "builtin:parity", "--kse", "4", "--emit-strategy"];
    let (a, b) = (pvg(&args), pvg(&args));
    assert_eq!(a.stdout, b.stdout);
    let other = pvg(&["solve", "builtin:parity", "--kse", "2"]);
    assert_ne!(a.json()["inputs_digest"], other.json()["inputs_digest"]);
    let timed = pvg(&["solve", "builtin:parity", "--kse", "4", "--emit-strategy", "--timings"]);
    assert_eq!(timed.json()["inputs_digest"], a.json()["inputs_digest"]);
    assert!(timed.json()["timings"]["total_ms"].is_u64());
}

#[test]
fn failures_never_write_output_files() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.tcm", "states q0; init q0; halt qh;");
    let out = dir.path().join("g.json");
    assert_eq!(pvg(&["encode-2cm", s(&bad), "--out", s(&out)]).code, 2);
    assert!(!out.exists());
    let out = dir.path().join("r.json");
    assert_eq!(pvg(&["solve", "builtin:parity", "--kse", "8", "--budget", "5", "--out", s(&out)]).code, 4);
    assert!(!out.exists());
    assert_eq!(pvg(&["solve", "builtin:parity", "--kse", "2", "--out", s(&out)]).code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["winner"], "System");
}
