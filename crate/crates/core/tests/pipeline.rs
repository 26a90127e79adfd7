use imandra_core::defn::{admit_group, AdmissionError, NoProver};
use imandra_core::eval::{self, Value};
use imandra_core::lower::lower_goal;
use imandra_core::syntax::{alpha_eq_decl, parse_expr, parse_module, pretty_module, Decl};
use imandra_core::template::template_for;
use imandra_core::typecheck::infer_goal;
use imandra_core::world::World;
use proptest::prelude::*;

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../imandra/tests/corpus");

fn structural(src: &str) -> World {
    let mut w = World::new();
    for d in parse_module(src).unwrap().decls {
        if let Decl::Fun(g) = d {
            w = admit_group(&g, &w, &mut NoProver).unwrap().0;
        }
    }
    w
}

#[test]
fn corpus_survives_printing() {
    let mut n = 0;
    for e in std::fs::read_dir(CORPUS).unwrap() {
        let src = std::fs::read_to_string(e.unwrap().path()).unwrap();
        let m = parse_module(&src).unwrap();
        let again = parse_module(&pretty_module(&m)).unwrap();
        assert_eq!(m.decls.len(), again.decls.len());
        for (a, b) in m.decls.iter().zip(&again.decls) {
            assert!(alpha_eq_decl(a, b), "{:?}", a);
        }
        n += 1;
    }
    assert!(n >= 4);
}

#[test]
fn refusing_prover_admits_only_structural_recursion() {
    let w = structural("let rec count l = match l with [] -> 0 | x :: r -> (if x then 1 else 0) + count r");
    assert!(w.fun("count").is_some());
    let m = parse_module("let rec fact x = if x > 1 then x * fact (x - 1) else 1").unwrap();
    let Decl::Fun(g) = &m.decls[0] else { panic!() };
    assert!(matches!(admit_group(g, &World::new(), &mut NoProver), Err(AdmissionError::TerminationUnproved { .. })));
}

#[test]
fn lowered_template_of_count() {
    let w = structural("let rec count l = match l with [] -> 0 | x :: r -> (if x then 1 else 0) + count r");
    let g = infer_goal(&parse_expr("fun l -> count l >= 0").unwrap(), &w).unwrap();
    let (gp, _) = lower_goal(&w, &g).unwrap();
    let tpl = template_for(&gp, "count").unwrap().to_string();
    assert!(tpl.contains("count"), "{}", tpl);
}

proptest! {
    /// The lowered goal evaluates like the source goal.
    #[test]
    fn lowering_preserves_values(xs in proptest::collection::vec(-5i64..5, 0..6), k in -3i64..3, off in 0i64..2) {
        let w = World::new();
        let src = "fun (l : int list) (k : int) (s : int) -> List.length (List.map (fun x -> x + k) l) + List.fold_left (fun a x -> a + x) 0 l = s";
        let g = infer_goal(&parse_expr(src).unwrap(), &w).unwrap();
        let l = Value::list(xs.iter().map(|&x| Value::int(x)).collect::<Vec<_>>());
        let s = xs.len() as i64 + xs.iter().sum::<i64>() + off;
        let env = vec![("l".to_string(), l), ("k".to_string(), Value::int(k)), ("s".to_string(), Value::int(s))];
        let direct = eval::eval(&w, &g.body, &env).unwrap();
        let (gp, gg) = lower_goal(&w, &g).unwrap();
        let genv: Vec<(String, Value)> = g.vars.iter().zip(&env)
            .map(|((x, t), (_, v))| (x.clone(), eval::to_ground(v, t, &w, &gp).unwrap()))
            .collect();
        let lowered = eval::eval(&gp, &gg.body, &genv).unwrap();
        prop_assert_eq!(direct, lowered.clone());
        prop_assert_eq!(lowered, Value::Bool(off == 0));
    }
}
