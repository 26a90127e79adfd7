use imandra_core::eval::{self, Polarity};
use imandra_core::syntax::parse_expr;
use imandra_core::typecheck::infer_goal;
use imandra_core::world::World;
use mini_imandra::driver::{Checked, Driver, Event};
use mini_imandra::engine::Verdict;
use mini_imandra::waterfall::{self, generalize, GiveUp, GoalState, Outcome, WaterfallConfig};

fn session(src: &str) -> (Driver, Vec<Checked>) {
    let mut d = Driver::new(WaterfallConfig::default());
    let mut out = Vec::new();
    for r in d.run_source(src).unwrap() {
        if let Event::Checked(c) = r.unwrap() {
            out.push(c);
        }
    }
    (d, out)
}

fn goal(w: &World, e: &str) -> GoalState {
    GoalState::from_formula(&infer_goal(&parse_expr(e).unwrap(), w).unwrap().body)
}

const SAME_LEN: &str = "theorem same_len l = List.length (List.map (fun x -> x + 1) l) = List.length l [@@auto]";
const REV_SNOC: &str = "theorem rev_snoc x a = List.rev (List.append x [a]) = a :: List.rev x [@@auto] [@@rewrite]";

#[test]
fn same_len_by_induction() {
    let (_, cs) = session(SAME_LEN);
    assert_eq!(cs[0].verdict, Verdict::Proved);
    assert!(cs[0].waterfall_trace.iter().any(|l| l.contains("induct: induction following List.map")));
}

#[test]
fn same_len_needs_induction() {
    let (_, cs) = session("verify upto 5 (fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l)");
    assert_eq!(cs[0].verdict, Verdict::Unknown { bound: 5, reason: None });
}

#[test]
fn rev_rev_with_helper_rule() {
    let src = format!("{}\nverify (fun l -> List.rev (List.rev l) = l) [@@auto]", REV_SNOC);
    let (d, cs) = session(&src);
    assert_eq!(cs[0].verdict, Verdict::Proved);
    assert!(cs[0].rule_installed);
    assert_eq!(d.world.rules().count(), 1);
    assert_eq!(cs[1].verdict, Verdict::Proved);
    assert!(cs[1].waterfall_trace.iter().any(|l| l.contains("using rev_snoc")));
}

#[test]
fn rev_rev_without_helper_gives_up() {
    let (_, cs) = session("verify (fun (l : int list) -> List.rev (List.rev l) = l) [@@auto]");
    assert!(matches!(cs[0].verdict, Verdict::Unknown { .. }), "{:?}", cs[0].verdict);
}

#[test]
fn palindrome_refuted_through_waterfall() {
    let (d, cs) = session("verify (fun (l : int list) -> List.rev l = l) [@@auto]");
    let cx = cs[0].verdict.counterexample().expect("refuted").clone();
    let g = infer_goal(&parse_expr("fun (l : int list) -> List.rev l = l").unwrap(), &d.world).unwrap();
    let mut cx2 = cx.clone();
    assert!(eval::check_cx(&d.world, &g.body, &mut cx2, Polarity::Verify).unwrap());
    assert!(cx.confirmed);
}

#[test]
fn true_goal_has_empty_trace() {
    let w = World::new();
    let g = infer_goal(&parse_expr("fun (x : int) -> true").unwrap(), &w).unwrap();
    let p = waterfall::prove(&g, &w, &WaterfallConfig::default());
    assert_eq!(p.outcome, Outcome::Proved);
    assert!(p.trace.is_empty());
}

#[test]
fn unprovable_rule_is_not_installed() {
    let (d, cs) = session("theorem bogus (l : int list) = List.rev l = l [@@auto] [@@rewrite]");
    assert!(matches!(cs[0].verdict, Verdict::Refuted(_)));
    assert!(!cs[0].rule_installed);
    assert_eq!(d.world.rules().count(), 0);
}

#[test]
fn no_scheme_for_int_goals() {
    let (d, _) = session("let f x = x * x");
    let g = infer_goal(&parse_expr("fun x y -> f x + f y >= 2 * x * y").unwrap(), &d.world).unwrap();
    let mut cfg = WaterfallConfig::default();
    cfg.engine.budget = 5;
    let p = waterfall::prove(&g, &d.world, &cfg);
    assert!(matches!(p.outcome, Outcome::GaveUp(GiveUp::NoScheme) | Outcome::Proved), "{:?}", p.outcome);
}

#[test]
fn generalization_filter_pair() {
    let w = World::new();
    let cfg = WaterfallConfig::default();
    let ok = goal(&w, "fun (l : int list) -> List.length (List.rev l) * 2 = List.length (List.rev l) + List.length (List.rev l)");
    let g = generalize(&ok, &w, &cfg);
    assert_eq!(g.concl.to_string(), "g1 * 2 = g1 + g1");
    let bad = goal(&w, "fun (l : int list) -> List.length (List.rev l) + List.length (List.rev l) >= 0");
    assert_eq!(generalize(&bad, &w, &cfg), bad);
}

#[test]
fn generalization_rejects_noncommutative_swap() {
    let (d, _) = session("let nc a b = a - b\nlet sq x = x * x");
    let cfg = WaterfallConfig::default();
    let g = goal(&d.world, "fun x y -> nc (sq x) (sq y) + nc (sq y) (sq x) = 0 && sq x >= 0");
    assert!(waterfall::generalize_candidate(&g).is_some());
    assert_eq!(generalize(&g, &d.world, &cfg), g);
}

#[test]
fn depth_cap() {
    let w = World::new();
    let g = infer_goal(&parse_expr("fun (l : int list) -> List.rev (List.rev l) = l").unwrap(), &w).unwrap();
    let mut cfg = WaterfallConfig::default();
    cfg.max_depth = 0;
    cfg.engine.budget = 5;
    let p = waterfall::prove(&g, &w, &cfg);
    assert_eq!(p.outcome, Outcome::GaveUp(GiveUp::MaxDepth));
}
