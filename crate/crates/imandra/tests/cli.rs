use std::io::{Cursor, Write};
use std::process::{Command, Output as ProcOutput, Stdio};

use serde_json::Value as Json;

use mini_imandra::cli::{self, Output};
use mini_imandra::driver::Driver;
use mini_imandra::waterfall::WaterfallConfig;

const BIN: &str = env!("CARGO_BIN_EXE_mini-imandra");

fn corpus(name: &str) -> String {
    format!("{}/tests/corpus/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn run(args: &[&str]) -> ProcOutput {
    Command::new(BIN).args(args).output().unwrap()
}

fn records(stdout: &[u8]) -> Vec<Json> {
    String::from_utf8_lossy(stdout)
        .lines()
        .map(|l| {
            let mut v: Json = serde_json::from_str(l).unwrap_or_else(|e| panic!("{}: {}", e, l));
            v.as_object_mut().unwrap().remove("millis");
            v
        })
        .collect()
}

fn repl(input: &str, machine: bool) -> (Driver, String) {
    let mut d = Driver::new(WaterfallConfig::default());
    let out = Output { machine, ..Output::default() };
    let mut w = Vec::new();
    cli::repl(&mut d, &out, &mut Cursor::new(input), &mut w, &mut Vec::new(), false).unwrap();
    (d, String::from_utf8(w).unwrap())
}

#[test]
fn exit_codes() {
    for (file, code) in [("proved.iml", 0), ("refuted.iml", 1), ("unknown.iml", 2), ("rejected.iml", 3)] {
        let o = run(&[&corpus(file)]);
        assert_eq!(o.status.code(), Some(code), "{}: {}", file, String::from_utf8_lossy(&o.stdout));
    }
    let o = run(&[&corpus("rejected.iml"), &corpus("unknown.iml")]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(run(&["/nonexistent/file.iml"]).status.code(), Some(3));
}

#[test]
fn bad_flags_are_rejected() {
    assert_ne!(run(&["--unroll-limit", "0", &corpus("unknown.iml")]).status.code(), Some(0));
    assert_ne!(run(&["--timeout-ms", "x"]).status.code(), Some(0));
}

#[test]
fn unroll_limit_flag() {
    // An explicit `upto` wins over the flag.
    let o = run(&["--machine", "--unroll-limit", "3", &corpus("unknown.iml")]);
    let r = records(&o.stdout);
    assert_eq!(r[0]["verdict"], "unknown");
    assert_eq!(r[0]["bound"], 5);
    let o = run(&["--machine", "--unroll-limit", "1", &corpus("refuted.iml")]);
    let r = records(&o.stdout);
    assert_eq!(r[0]["verdict"], "unknown");
    assert_eq!(r[0]["bound"], 1);
}

#[test]
fn machine_records_are_deterministic() {
    let a = run(&["--machine", &corpus("refuted.iml")]);
    let b = run(&["--machine", &corpus("refuted.iml")]);
    let (ra, rb) = (records(&a.stdout), records(&b.stdout));
    assert_eq!(ra, rb);
    assert_eq!(ra.len(), 6);
    assert_eq!(ra[0]["verdict"], "refuted");
    assert!(ra[0]["bindings"]["l"].is_string());
    assert_eq!(ra[4]["verdict"], "instance");
    assert!(ra.iter().all(|r| r["bound"].is_null() && r["directive"].is_string() && r["source"].is_string()));
}

#[test]
fn traces_go_to_stderr() {
    let o = run(&["--trace-unroll", &corpus("unknown.iml")]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().filter(|l| l.starts_with("[unroll]")).count(), 6, "{}", err);
    assert!(!String::from_utf8_lossy(&o.stdout).contains("[unroll]"));
}

#[test]
fn piped_stdin_runs_the_loop() {
    let mut c = Command::new(BIN).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    c.stdin.take().unwrap().write_all(b"let sq x = x * x\nsq 7\n#quit\nsq 8\n").unwrap();
    let o = c.wait_with_output().unwrap();
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.contains("- : int = 49"), "{}", s);
    assert!(!s.contains("64"));
}

/// Feeding a file line by line gives the same world and the same answers as
/// checking it in batch.
#[test]
fn repl_matches_batch() {
    for file in ["proved.iml", "refuted.iml"] {
        let src = std::fs::read_to_string(corpus(file)).unwrap();
        let (d, out) = repl(&src, true);
        let mut b = Driver::new(WaterfallConfig::default());
        for r in b.run_source(&src).unwrap() {
            r.unwrap();
        }
        assert_eq!(d.world.admission_order(), b.world.admission_order(), "{}", file);
        let rules = |d: &Driver| d.world.rules().map(|t| t.name.clone()).collect::<Vec<_>>();
        assert_eq!(rules(&d), rules(&b));
        let batch = run(&["--machine", &corpus(file)]);
        assert_eq!(records(out.as_bytes()), records(&batch.stdout), "{}", file);
    }
}

#[test]
fn counterexample_is_bound_in_the_loop() {
    let (_, out) = repl("verify (fun (l : int list) -> List.rev l = l)\nList.length CX.l\nList.rev CX.l = CX.l\n", false);
    assert!(out.contains("- : int = 2"), "{}", out);
    assert!(out.contains("- : bool = false"), "{}", out);
}

#[test]
fn commands() {
    let (d, out) = repl("let rec fact x = if x > 1 then x * fact (x - 1) else 1\n#show fact\n#measure fact\n#template fact\n#config\n#show nope\n", false);
    assert!(d.world.fun("fact").is_some());
    assert!(out.contains("let rec fact x"), "{}", out);
    assert!(out.contains("fact: measure Ordinal.of_int x"), "{}", out);
    assert!(out.contains("(fact, (x - 1), x > 1)"), "{}", out);
    assert!(out.contains("unroll limit: 100"), "{}", out);
    assert!(out.contains("unknown name `nope`"), "{}", out);
}

#[test]
fn errors_do_not_end_the_loop() {
    let (d, out) = repl("let f x = x +\n;;\nlet g (x : int) = x && true\nlet h x = x + 1\nh 1\n", false);
    assert!(out.contains("error"), "{}", out);
    assert!(d.world.fun("g").is_none());
    assert!(out.contains("- : int = 2"), "{}", out);
}
