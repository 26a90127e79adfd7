use std::collections::BTreeSet;

use imandra_core::defn::admit_group;
use imandra_core::eval::{self, Value};
use imandra_core::lower::{lower_goal, GroundGoal, GroundProgram};
use imandra_core::syntax::{parse_expr, parse_module, Decl};
use imandra_core::term::Term;
use imandra_core::typecheck::infer_goal;
use imandra_core::world::World;
use mini_imandra::engine::{EngineConfig, SmtProver};
use mini_imandra::smt::{Session, SolverConfig};
use mini_imandra::unroll::{pick_from, UnrollOutcome, Unroller};

const FACT: &str = "let rec fact x = if x > 1 then x * fact (x - 1) else 1";
const GH: &str = "let g x = x > 0\nlet h b = if b then 1 else 2\nlet f x = 1 + (if g 0 then h (g x) else h false)";

fn world(src: &str) -> World {
    let mut w = World::new();
    for d in parse_module(src).unwrap().decls {
        if let Decl::Fun(g) = d {
            w = admit_group(&g, &w, &mut SmtProver::new(EngineConfig::default())).unwrap().0;
        }
    }
    w
}

fn lowered(w: &World, goal: &str) -> (GroundProgram, GroundGoal) {
    let g = infer_goal(&parse_expr(goal).unwrap(), w).unwrap();
    lower_goal(w, &g).unwrap()
}

fn unroller<'p>(gp: &'p GroundProgram, gg: &GroundGoal) -> Unroller<'p> {
    let s = Session::start(&SolverConfig::from_env()).unwrap();
    Unroller::new(gp, &gg.vars, &gg.body, s, BTreeSet::new()).unwrap()
}

fn calls(u: &Unroller<'_>, ix: &[usize]) -> Vec<String> {
    ix.iter().map(|&i| u.lits[i].call.to_string()).collect()
}

#[test]
fn calls_of_term_examples() {
    let w = world(FACT);
    let (gp, gg) = lowered(&w, "fun k -> fact k = 120");
    let mut u = unroller(&gp, &gg);
    let ix = u.calls_of_term(&gg.body).unwrap();
    assert_eq!(calls(&u, &ix), ["fact k"]);

    let (gp, gg) = lowered(&w, "fun x -> x + 1 > x");
    let mut u = unroller(&gp, &gg);
    assert!(u.calls_of_term(&gg.body).unwrap().is_empty());

    let (gp, gg) = lowered(&World::new(), "fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l");
    let mut u = unroller(&gp, &gg);
    assert_eq!(u.calls_of_term(&gg.body).unwrap().len(), 3);
}

#[test]
fn literals_are_shared_per_call() {
    let w = world(FACT);
    let (gp, gg) = lowered(&w, "fun k -> fact k = fact k + 0");
    let mut u = unroller(&gp, &gg);
    let a = u.calls_of_term(&gg.body).unwrap();
    let b = u.calls_of_term(&gg.body).unwrap();
    assert_eq!(a, b);
    assert_eq!(u.lits.len(), 1);
}

#[test]
fn subcalls_of_fact() {
    let w = world(FACT);
    let (gp, gg) = lowered(&w, "fun k -> fact k = 120");
    let mut u = unroller(&gp, &gg);
    let call = Term::call("fact", vec![Term::int(7)], imandra_core::types::Type::Int);
    let subs = u.subcalls_of_call(&call).unwrap();
    assert_eq!(subs.len(), 1);
    assert_eq!(u.lits[subs[0].0].call.to_string(), "fact 6");
    assert!(subs[0].1.is_true());
    // A false path contributes nothing.
    let call = Term::call("fact", vec![Term::int(1)], imandra_core::types::Type::Int);
    assert!(u.subcalls_of_call(&call).unwrap().is_empty());
}

#[test]
fn subcalls_follow_the_template_paths() {
    let w = world(GH);
    let (gp, gg) = lowered(&w, "fun y -> f y = 2");
    let mut u = unroller(&gp, &gg);
    let call = u.calls_of_term(&gg.body).unwrap();
    let call = u.lits[call[0]].call.clone();
    let subs: Vec<(String, String)> = u.subcalls_of_call(&call).unwrap().into_iter().map(|(i, p)| (u.lits[i].call.to_string(), p.to_string())).collect();
    assert_eq!(
        subs,
        [
            ("g 0".to_string(), "true".to_string()),
            ("h (g y)".to_string(), "g 0".to_string()),
            ("g y".to_string(), "g 0".to_string()),
            ("h false".to_string(), "not (g 0)".to_string()),
        ]
    );
}

#[test]
fn fair_picker_prefers_the_oldest() {
    let w = world(FACT);
    let (gp, gg) = lowered(&w, "fun a b -> fact a + fact b = 3");
    let mut u = unroller(&gp, &gg);
    let ix = u.calls_of_term(&gg.body).unwrap();
    assert_eq!(ix.len(), 2);
    // Same enqueue step: the printed call decides.
    assert_eq!(u.lits[pick_from(&u, &ix)].call.to_string(), "fact a");
    assert_eq!(pick_from(&u, &ix[1..]), ix[1]);
    u.lits[ix[0]].enqueued = 5;
    assert_eq!(pick_from(&u, &ix), ix[1]);
}

#[test]
fn fact_five_is_proved() {
    let w = world(FACT);
    let (gp, gg) = lowered(&w, "fun (u : int) -> not (fact 5 = 120)");
    let mut u = unroller(&gp, &gg);
    let out = u.run(10).unwrap();
    assert_eq!(out, UnrollOutcome::UnsatEmptyCore);
    let n = u.expanded().count();
    assert!((4..=6).contains(&n), "{} expansions", n);
}

#[test]
fn budget_is_respected() {
    let w = world(FACT);
    let (gp, gg) = lowered(&w, "fun k -> k > 0 && fact k < k");
    let mut u = unroller(&gp, &gg);
    match u.run(4).unwrap() {
        UnrollOutcome::BudgetExhausted { last_core, reason } => {
            assert!(reason.is_none());
            assert!(!last_core.is_empty());
        }
        o => panic!("{:?}", o),
    }
    assert_eq!(u.expanded().count(), 4);
}

/// Each unsat step expands exactly one queued literal, and nothing leaves the
/// expanded set.
#[test]
fn progress_is_monotone() {
    let w = world(FACT);
    for goal in ["fun k -> fact k = 720", "fun k -> k > 0 && fact k < k", "fun (l : int list) -> List.length l = 4"] {
        let (gp, gg) = lowered(&w, goal);
        let mut u = unroller(&gp, &gg);
        let _ = u.run(12).unwrap();
        let mut prev = 0;
        for s in &u.trace {
            if s.picked.is_some() {
                assert_eq!(s.expanded, prev + 1, "{}: {}", goal, s);
                prev = s.expanded;
            } else {
                assert_eq!(s.expanded, prev, "{}: {}", goal, s);
            }
        }
        let exp: Vec<String> = u.expanded().map(|l| l.call.to_string()).collect();
        let uniq: BTreeSet<&String> = exp.iter().collect();
        assert_eq!(uniq.len(), exp.len(), "{}: expanded twice", goal);
        assert!(u.queue().all(|l| !exp.contains(&l.call.to_string())));
    }
}

/// A model returned with literals blocked must satisfy the goal under full
/// evaluation.
#[test]
fn models_satisfy_the_goal() {
    let w = world(FACT);
    for goal in ["fun k -> fact k = 720", "fun (l : int list) -> List.length l = 4", "fun (l : int list) -> List.rev l <> l"] {
        let (gp, gg) = lowered(&w, goal);
        let mut u = unroller(&gp, &gg);
        match u.run(20).unwrap() {
            UnrollOutcome::Sat(env) => assert_eq!(eval::eval(&gp, &gg.body, &env).unwrap(), Value::Bool(true), "{}", goal),
            o => panic!("{}: {:?}", goal, o),
        }
    }
}
