use std::io::Write;
use std::process::{Command, Stdio};

use imandra_core::eval::{self, Value};
use imandra_core::lower::{lower_goal, GroundProgram};
use imandra_core::syntax::{parse_expr, BinOp};
use imandra_core::term::Term;
use imandra_core::typecheck::infer_goal;
use imandra_core::types::Type;
use imandra_core::world::World;
use mini_imandra::smt::sexp::parse_all;
use mini_imandra::smt::{encode, CheckResult, Encoder, Session, SolverConfig, SolverError, Sexp};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn start() -> Session {
    Session::start(&SolverConfig::from_env()).expect("solver available")
}

fn sx(text: &str) -> Sexp {
    mini_imandra::smt::sexp::parse_one(text).unwrap()
}

#[test]
fn empty_script_is_sat() {
    let mut s = start();
    assert_eq!(s.check_sat().unwrap(), CheckResult::Sat);
}

#[test]
fn bogus_command_fails_to_start() {
    let cfg = SolverConfig { command: "definitely-not-a-solver-binary".into(), timeout_ms: None };
    assert!(matches!(Session::start(&cfg), Err(SolverError::Start(..))));
    let cfg = SolverConfig { command: "   ".into(), timeout_ms: None };
    assert!(matches!(Session::start(&cfg), Err(SolverError::Start(..))));
}

#[test]
fn timeout_is_sent_to_the_solver() {
    let mut cfg = SolverConfig::from_env();
    cfg.timeout_ms = Some(2000);
    let s = Session::start(&cfg).unwrap();
    assert!(s.log.iter().any(|c| c.contains("2000") && (c.contains(":timeout") || c.contains(":tlimit-per"))));
}

#[test]
fn small_queries() {
    let mut s = start();
    s.command(&sx("(declare-const x Int)")).unwrap();
    s.command(&sx("(declare-const a Bool)")).unwrap();
    s.assert(sx("(>= x 3)")).unwrap();
    assert_eq!(s.check_sat().unwrap(), CheckResult::Sat);
    let v = s.get_values(&[sx("x")]).unwrap();
    let n: i64 = v[0].as_atom().unwrap().parse().unwrap();
    assert!(n >= 3);
    s.assert(sx("(=> a false)")).unwrap();
    assert_eq!(s.check_sat_assuming(&[sx("a")]).unwrap(), CheckResult::Unsat(vec![sx("a")]));
    s.assert(sx("(> x 0)")).unwrap();
    s.assert(sx("(< x 1)")).unwrap();
    assert_eq!(s.check_sat_assuming(&[]).unwrap(), CheckResult::Unsat(vec![]));
}

#[test]
fn protocol_errors_surface() {
    let mut s = start();
    let e = s.assert(sx("(> undeclared 0)")).unwrap_err();
    assert!(matches!(e, SolverError::Protocol { .. }), "{:?}", e);
    assert_eq!(s.check_sat().unwrap(), CheckResult::Sat);
}

fn lowered(goal: &str) -> (GroundProgram, Vec<(String, Type)>, Term) {
    let w = World::new();
    let g = infer_goal(&parse_expr(goal).unwrap(), &w).unwrap();
    let (gp, gg) = lower_goal(&w, &g).unwrap();
    (gp, gg.vars, gg.body)
}

#[test]
fn lowered_list_type_declaration() {
    let (gp, vars, body) = lowered("fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l");
    let tys: Vec<Type> = vars.iter().map(|(_, t)| t.clone()).collect();
    let mut enc = Encoder::new(&gp, &tys);
    enc.note_term(&body);
    let decls: Vec<String> = enc.declarations().iter().map(|d| d.to_string()).collect();
    let dt = decls.iter().find(|d| d.starts_with("(declare-datatypes")).unwrap();
    assert!(dt.contains("Nil_int") && dt.contains("Cons_int") && dt.contains("Int"), "{}", dt);
    let mut s = start();
    for d in enc.declarations() {
        s.command(&d).unwrap();
    }
    for (x, t) in &vars {
        s.command(&enc.declare_const(x, t)).unwrap();
    }
    s.assert(sx(&format!("(is-{} {})", encode::symbol("c!", "Cons_int"), encode::var_symbol("l")))).unwrap();
    assert_eq!(s.check_sat().unwrap(), CheckResult::Sat);
    let v = s.get_values(&[Sexp::atom(encode::var_symbol("l"))]).unwrap();
    let val = enc.value(&v[0], &vars[0].1).unwrap();
    assert!(matches!(&val, Value::Ctor(c, xs) if c == "Cons_int" && xs.len() == 2), "{}", val);
}

#[test]
fn tuples_and_booleans_declare() {
    let (gp, vars, body) = lowered("fun (p : int * bool) b -> (match p with (x, c) -> c && b && x > 2)");
    let tys: Vec<Type> = vars.iter().map(|(_, t)| t.clone()).collect();
    let mut enc = Encoder::new(&gp, &tys);
    enc.note_term(&body);
    let mut s = start();
    for d in enc.declarations() {
        s.command(&d).unwrap();
    }
    for (x, t) in &vars {
        s.command(&enc.declare_const(x, t)).unwrap();
    }
    s.assert(enc.term(&body).unwrap()).unwrap();
    assert_eq!(s.check_sat().unwrap(), CheckResult::Sat);
    let names: Vec<Sexp> = vars.iter().map(|(x, _)| Sexp::atom(encode::var_symbol(x))).collect();
    let vals = s.get_values(&names).unwrap();
    let env: Vec<(String, Value)> = vars.iter().zip(&vals).map(|((x, t), v)| (x.clone(), enc.value(v, t).unwrap())).collect();
    assert!(matches!(&env[0].1, Value::Tuple(xs) if xs.len() == 2));
    assert_eq!(eval::eval(&gp, &body, &env).unwrap(), Value::Bool(true));
}

/// Random linear constraints over three integer constants.
fn constraint(rng: &mut StdRng) -> Term {
    let var = |rng: &mut StdRng| Term::var(["x", "y", "z"][rng.gen_range(0..3)], Type::Int);
    let lhs = Term::bin(
        BinOp::Add,
        Term::bin(BinOp::Mul, Term::int(rng.gen_range(-3..=3)), var(rng)),
        Term::bin(BinOp::Mul, Term::int(rng.gen_range(-3..=3)), var(rng)),
    );
    let op = [BinOp::Le, BinOp::Lt, BinOp::Eq, BinOp::Ge][rng.gen_range(0..4)];
    Term::bin(op, lhs, Term::int(rng.gen_range(-6..=6)))
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn fresh_session(enc: &Encoder) -> Session {
    let mut s = start();
    for x in VARS {
        s.command(&enc.declare_const(x, &Type::Int)).unwrap();
    }
    s
}

#[test]
fn cores_and_models_are_sound() {
    let gp = GroundProgram::default();
    let enc = Encoder::new(&gp, &[]);
    let mut rng = StdRng::seed_from_u64(7);
    let (mut sats, mut unsats) = (0, 0);
    for round in 0..60 {
        let n = rng.gen_range(2..6);
        let cs: Vec<Term> = (0..n).map(|_| constraint(&mut rng)).collect();
        let mut s = fresh_session(&enc);
        let lits: Vec<Sexp> = (0..n).map(|i| Sexp::atom(format!("p{}", i))).collect();
        for (i, c) in cs.iter().enumerate() {
            s.command(&sx(&format!("(declare-const p{} Bool)", i))).unwrap();
            s.assert(Sexp::list([Sexp::atom("=>"), lits[i].clone(), enc.term(c).unwrap()])).unwrap();
        }
        match s.check_sat_assuming(&lits).unwrap() {
            CheckResult::Sat => {
                sats += 1;
                let names: Vec<Sexp> = VARS.iter().map(|x| Sexp::atom(encode::var_symbol(x))).collect();
                let vals = s.get_values(&names).unwrap();
                let env: Vec<(String, Value)> = VARS.iter().zip(&vals).map(|(x, v)| (x.to_string(), enc.value(v, &Type::Int).unwrap())).collect();
                for c in &cs {
                    assert_eq!(eval::eval(&gp, c, &env).unwrap(), Value::Bool(true), "round {}: {}", round, c);
                }
            }
            CheckResult::Unsat(core) => {
                unsats += 1;
                assert!(core.iter().all(|c| lits.contains(c)), "core outside assumptions");
                let mut t = fresh_session(&enc);
                for c in &core {
                    let i: usize = c.as_atom().unwrap()[1..].parse().unwrap();
                    t.assert(enc.term(&cs[i]).unwrap()).unwrap();
                }
                assert!(matches!(t.check_sat().unwrap(), CheckResult::Unsat(_)), "round {}: core not unsat", round);
            }
            CheckResult::Unknown(r) => panic!("unknown: {}", r),
        }
    }
    assert!(sats > 5 && unsats > 5, "{} sat, {} unsat", sats, unsats);
}

/// Answers from one interactive session must match a batch run of the same
/// scripts.
#[test]
fn interleaved_queries_match_batch_mode() {
    let gp = GroundProgram::default();
    let enc = Encoder::new(&gp, &[]);
    let mut rng = StdRng::seed_from_u64(11);
    let scripts: Vec<Vec<Sexp>> = (0..1000)
        .map(|_| (0..rng.gen_range(1..4)).map(|_| enc.term(&constraint(&mut rng)).unwrap()).collect())
        .collect();
    let mut s = fresh_session(&enc);
    let mut live = Vec::new();
    for sc in &scripts {
        s.command(&sx("(push 1)")).unwrap();
        for f in sc {
            s.assert(f.clone()).unwrap();
        }
        live.push(match s.check_sat().unwrap() {
            CheckResult::Sat => "sat",
            CheckResult::Unsat(_) => "unsat",
            CheckResult::Unknown(_) => "unknown",
        });
        s.command(&sx("(pop 1)")).unwrap();
    }
    let mut script = String::new();
    for x in VARS {
        script.push_str(&format!("{}\n", enc.declare_const(x, &Type::Int)));
    }
    for sc in &scripts {
        script.push_str("(push 1)\n");
        for f in sc {
            script.push_str(&format!("(assert {})\n", f));
        }
        script.push_str("(check-sat)\n(pop 1)\n");
    }
    assert_eq!(parse_all(&script).unwrap().len(), 3 + scripts.iter().map(|s| s.len() + 3).sum::<usize>());
    let cmd = SolverConfig::from_env().command;
    let mut parts = cmd.split_whitespace();
    let mut child = Command::new(parts.next().unwrap()).args(parts).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    let batch: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(str::to_string).collect();
    assert_eq!(batch.len(), live.len());
    for (i, (a, b)) in live.iter().zip(&batch).enumerate() {
        assert_eq!(a, b, "script {}", i);
    }
}
