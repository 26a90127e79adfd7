use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use imandra_core::defn::{admit_group, admit_theorem, admit_type, MeasureSpec, TerminationVC, VcProver};
use imandra_core::eval::{self, arbitrary_value, Evaluator, Value};
use imandra_core::syntax::{parse_expr, parse_module, Decl};
use imandra_core::term::Term;
use imandra_core::typecheck::{infer_goal, infer_theorem};
use imandra_core::world::World;

use super::*;

struct Yes;

impl VcProver for Yes {
    fn discharge(&mut self, _: &World, _: &[String], _: &TerminationVC) -> Result<bool, String> {
        Ok(true)
    }
}

/// Admits types and functions, and every theorem as if proved.
fn load(src: &str) -> World {
    let mut w = World::new();
    for d in parse_module(src).unwrap().decls {
        match d {
            Decl::Type(t) => w = admit_type(&t, &w).unwrap(),
            Decl::Fun(g) => w = admit_group(&g, &w, &mut Yes).unwrap().0,
            Decl::Theorem(t) => w = admit_theorem(&infer_theorem(&t, &w).unwrap(), &w, true),
            Decl::Directive(_) => {}
        }
    }
    w
}

fn goal(w: &World, e: &str) -> GoalState {
    GoalState::from_formula(&infer_goal(&parse_expr(e).unwrap(), w).unwrap().body)
}

const ACK: &str = "let rec ack m n = if m <= 0 then n + 1 else if n <= 0 then ack (m - 1) 1 else ack (m - 1) (ack m (n - 1))\n[@@adm m, n]";
const REV_REV: &str = "theorem rev_rev x = List.rev (List.rev x) = x [@@rewrite]";
const REV_SNOC: &str = "theorem rev_snoc x a = List.rev (List.append x [a]) = a :: List.rev x [@@rewrite]";
const NC: &str = "let nc a b = a - b\nlet sq x = x * x";

fn seeded(seed: u64) -> impl FnMut(u64) -> u64 {
    let mut rng = StdRng::seed_from_u64(seed);
    move |n| if n == 0 { 0 } else { rng.gen_range(0..n) }
}

fn eval_formula(w: &World, t: &Term, env: &[(String, Value)]) -> Option<bool> {
    match Evaluator::new(w).with_fuel(200_000).eval(t, env) {
        Ok(Value::Bool(b)) => Some(b),
        _ => None,
    }
}

#[test]
fn rules_come_from_equations() {
    let w = load(REV_SNOC);
    let rules = rewrite::rules_of(&w);
    assert_eq!(rules.len(), 1);
    let r = &rules[0];
    assert_eq!(r.name, "rev_snoc");
    assert!(r.hyps.is_empty());
    assert_eq!(r.lhs.to_string(), "List.rev (List.append x [a])");
    let t = infer_goal(&parse_expr("fun (t : int list) h -> List.rev (List.append (List.rev t) [h]) = []").unwrap(), &w).unwrap();
    let lhs = match &t.body.kind {
        imandra_core::term::TermKind::Bin(_, l, _) => (**l).clone(),
        _ => unreachable!(),
    };
    let (hyps, rhs) = r.apply(&lhs).unwrap();
    assert!(hyps.is_empty());
    assert_eq!(rhs.to_string(), "h :: List.rev (List.rev t)");
}

#[test]
fn rules_need_bound_right_sides() {
    let w = load("theorem v x = x = x + 0 [@@rewrite]\ntheorem open_rhs x y = List.length x = List.length y [@@rewrite]");
    assert!(rewrite::rules_of(&w).is_empty());
}

#[test]
fn unproved_theorems_install_no_rule() {
    let w0 = World::new();
    let t = parse_module(REV_REV).unwrap();
    let Decl::Theorem(t) = &t.decls[0] else { panic!() };
    let w = admit_theorem(&infer_theorem(t, &w0).unwrap(), &w0, false);
    assert!(rewrite::rules_of(&w).is_empty());
}

#[test]
fn conditional_rules_discharge_hypotheses() {
    let w = load("let f x = if x > 0 then x else 0 - x\ntheorem f_pos x = x > 0 ==> f x = x [@@rewrite]");
    let r = &rewrite::rules_of(&w)[0];
    assert_eq!(r.hyps.len(), 1);
    let g = simplify(&goal(&w, "fun x -> x > 0 ==> f x + 1 = x + 1"), &w);
    assert!(g.is_proved(), "{}", g);
    let g = simplify(&goal(&w, "fun x -> f x + 1 = x + 1"), &w);
    assert!(!g.is_proved(), "{}", g);
}

#[test]
fn simplify_with_rev_rev() {
    let w = load(REV_REV);
    let g = simplify(&goal(&w, "fun (a : int list) -> List.rev (List.rev (List.rev a)) = List.rev a"), &w);
    assert!(g.is_proved(), "{}", g);
    let mut s = Simplifier::new(&w);
    simplify_with(&mut s, &goal(&w, "fun (a : int list) -> List.rev (List.rev (List.rev a)) = List.rev a"));
    assert_eq!(s.hits.get("rev_rev"), Some(&1));
}

#[test]
fn simplify_evaluates_ground_calls() {
    let w = load(ACK);
    let g = simplify(&goal(&w, "fun x -> ack 1 1 + x = x + 3"), &w);
    assert_eq!(g.concl.to_string(), "3 + x = x + 3");
    assert!(simplify(&goal(&w, "fun x -> ack 1 1 = 3"), &w).is_proved());
}

#[test]
fn simplify_leaves_true_alone() {
    let w = World::new();
    let g = goal(&w, "fun (x : int) -> true");
    assert_eq!(simplify(&g, &w), g);
}

#[test]
fn simplify_uses_hypothesis_equations() {
    let w = World::new();
    let g = simplify(&goal(&w, "fun (l : int list) (m : int list) -> List.rev l = m ==> List.length (List.rev l) = List.length m"), &w);
    assert!(g.is_proved(), "{}", g);
}

#[test]
fn simplify_step_cap() {
    let w = load("theorem loop x = List.rev x = List.rev (List.rev (List.rev x)) [@@rewrite]");
    let mut s = Simplifier::new(&w);
    simplify_with(&mut s, &goal(&w, "fun (x : int list) -> List.length (List.rev x) >= 0"));
    assert!(s.steps <= REWRITE_CAP + 1, "{}", s.steps);
}

#[test]
fn same_len_scheme() {
    let w = World::new();
    let g = goal(&w, "fun (l : int list) -> List.length (List.map (fun x -> x + 1) l) = List.length l");
    let s = synthesize_induction(&g, &w).unwrap();
    assert!(matches!(&s.kind, SchemeKind::Recursion(c) if c.to_string().starts_with("List.map")));
    assert_eq!(s.cases.len(), 2);
    let step = &s.cases[0];
    assert_eq!(step.bindings.len(), 1);
    assert_eq!(step.bindings[0].0, "l");
    assert!(step.bindings[0].1.to_string().contains("::"));
    assert_eq!(step.ihs.len(), 1);
    let tl = match &step.bindings[0].1.kind {
        imandra_core::term::TermKind::Ctor(_, xs) => xs[1].to_string(),
        _ => unreachable!(),
    };
    assert!(step.ihs[0].to_string().contains(&format!("List.length {}", tl)));
    let base = &s.cases[1];
    assert_eq!(base.bindings[0].1.to_string(), "[]");
    assert!(base.ihs.is_empty());
}

#[test]
fn ack_scheme_mirrors_guards() {
    let w = load(ACK);
    let g = goal(&w, "fun m n -> ack m n > n");
    let s = synthesize_induction(&g, &w).unwrap();
    assert_eq!(s.cases.len(), 3);
    let ihs: Vec<usize> = s.cases.iter().map(|c| c.ihs.len()).collect();
    assert_eq!(ihs, vec![1, 2, 0]);
    assert!(s.cases.iter().all(|c| !c.hyps.is_empty()));
}

#[test]
fn no_scheme_for_plain_ints() {
    let w = World::new();
    assert!(synthesize_induction(&goal(&w, "fun x -> x + 1 > x"), &w).is_none());
}

#[test]
fn structural_fallback() {
    let w = load("type t = Leaf | Node of t * int * t");
    let g = goal(&w, "fun (x : t) -> x = x");
    let s = synthesize_induction(&g, &w).unwrap();
    assert_eq!(s.kind, SchemeKind::Structural("x".into()));
    assert_eq!(s.cases.len(), 2);
    assert_eq!(s.cases[1].ihs.len(), 2);
}

#[test]
fn unchanged_arguments_stay_fixed() {
    let w = World::new();
    let g = goal(&w, "fun (x : int list) a -> List.rev (List.append x [a]) = a :: List.rev x");
    let s = synthesize_induction(&g, &w).unwrap();
    assert!(matches!(&s.kind, SchemeKind::Recursion(c) if c.to_string().starts_with("List.append")));
    assert!(s.cases[0].ihs[0].to_string().contains("[a]"));
}

#[test]
fn repeated_subterms_are_maximal() {
    let w = World::new();
    let g = goal(&w, "fun (l : int list) -> List.length (List.rev l) + List.length (List.rev l) >= List.length l");
    let reps = repeated_subterms(&g);
    assert_eq!(reps.len(), 1);
    assert_eq!(reps[0].to_string(), "List.length (List.rev l)");
    let c = generalize_candidate(&g).unwrap();
    assert_eq!(c.concl.to_string(), "g1 + g1 >= List.length l");
    assert!(generalize_candidate(&goal(&w, "fun (l : int list) -> List.length l >= 0")).is_none());
}

#[test]
fn generalization_filter_is_consulted() {
    let w = World::new();
    let g = goal(&w, "fun (l : int list) -> List.length (List.rev l) + List.length (List.rev l) >= 0");
    assert_eq!(generalize_with(&g, &mut |_| true), g);
    assert_ne!(generalize_with(&g, &mut |_| false), g);
}

fn corpus() -> (World, Vec<GoalState>) {
    let w = load(&format!("{}\n{}\n{}\n{}", ACK, REV_SNOC, NC, "let rec sum l = match l with [] -> 0 | x :: t -> x + sum t"));
    let goals = [
        "fun (a : int list) -> List.rev (List.rev (List.rev a)) = List.rev a",
        "fun (l : int list) -> List.length (List.map (fun x -> x + 1) l) = List.length l",
        "fun (x : int list) a -> List.rev (List.append x [a]) = a :: List.rev x",
        "fun (l : int list) -> List.rev (List.rev l) = l",
        "fun (l1 : int list) l2 -> List.length (List.append l1 l2) = List.length l1 + List.length l2",
        "fun (l : int list) k -> sum (List.map (fun x -> x + k) l) = sum l + k * List.length l",
        "fun m n -> m >= 0 && n >= 0 ==> ack m n > n",
        "fun x y -> nc (sq x) (sq y) + nc (sq y) (sq x) = 0",
        "fun (l : int list) -> if List.length l > 0 then l <> [] else l = []",
    ];
    let mut out = Vec::new();
    for e in goals {
        let g = goal(&w, e);
        if let Some(s) = synthesize_induction(&g, &w) {
            out.extend(s.cases.iter().map(|c| c.goal(1)));
        }
        out.push(g);
    }
    (w, out)
}

fn assignment(w: &World, g: &Term, seed: u64) -> Vec<(String, Value)> {
    let mut pick = seeded(seed);
    g.free_vars_typed().into_iter().map(|(x, t)| (x, arbitrary_value(w, &t.default_int(), 3, &mut pick))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplification_preserves_meaning(seed in any::<u64>()) {
        let (w, goals) = corpus();
        let mut compared = 0;
        for g in &goals {
            let s = simplify(g, &w);
            let before = g.formula();
            let after = s.formula();
            let env = assignment(&w, &before, seed);
            if let (Some(a), Some(b)) = (eval_formula(&w, &before, &env), eval_formula(&w, &after, &env)) {
                prop_assert_eq!(a, b, "{} ~> {}", g, s);
                compared += 1;
            }
        }
        prop_assert!(compared * 10 >= goals.len() * 9, "{} of {}", compared, goals.len());
    }

    #[test]
    fn induction_hypotheses_decrease_the_measure(seed in any::<u64>()) {
        let (w, _) = corpus();
        let mut audited = 0;
        let goals = [
            "fun (l : int list) -> List.length (List.map (fun x -> x + 1) l) = List.length l",
            "fun (x : int list) a -> List.rev (List.append x [a]) = a :: List.rev x",
            "fun m n -> ack m n > n",
            "fun (l : int list) -> sum l = sum (List.rev l)",
        ];
        for e in goals {
            let g = goal(&w, e);
            let s = synthesize_induction(&g, &w).unwrap();
            for case in &s.cases {
                let Some(call) = &case.call else { continue };
                let mut vars = call.free_vars_typed();
                for t in case.hyps.iter().chain(&case.ih_calls) {
                    for v in t.free_vars_typed() {
                        if !vars.contains(&v) {
                            vars.push(v);
                        }
                    }
                }
                let probe = Term::and_all(vars.iter().map(|(x, t)| Term::eq(Term::var(x.clone(), t.clone()), Term::var(x.clone(), t.clone()))));
                let env = assignment(&w, &probe, seed);
                if case.hyps.iter().any(|h| eval_formula(&w, h, &env) != Some(true)) {
                    continue;
                }
                for ih in &case.ih_calls {
                    prop_assert!(decreases(&w, call, ih, &env), "{} -> {} at {:?}", call, ih, env);
                    audited += 1;
                }
            }
        }
        prop_assert!(audited >= 2);
    }
}

/// Whether the callee's measure is smaller at `ih` than at `call` under `env`.
fn decreases(w: &World, call: &Term, ih: &Term, env: &[(String, Value)]) -> bool {
    let (f, args) = call.as_call().unwrap();
    let (_, ih_args) = ih.as_call().unwrap();
    let def = w.fun(f).unwrap();
    let vals = |xs: &[Term]| -> Vec<Value> { xs.iter().map(|a| eval::eval(w, a, env).unwrap()).collect() };
    let (a, b) = (vals(args), vals(ih_args));
    match def.measure.as_ref().unwrap() {
        MeasureSpec::Structural(i) => b[*i].size() < a[*i].size(),
        MeasureSpec::Explicit { term, .. } => {
            let at = |vs: &[Value]| {
                let env: Vec<(String, Value)> = def.params.iter().map(|(x, _)| x.clone()).zip(vs.iter().cloned()).collect();
                eval::eval(w, term, &env).unwrap()
            };
            let lt = Evaluator::new(w).call("Ordinal.lt", vec![at(&b), at(&a)]).unwrap();
            lt == Value::Bool(true)
        }
    }
}
