use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::defn::admit_group;
use crate::lower::Lowerer;
use crate::syntax::{parse_module, BinOp, Decl};
use crate::world::World;

fn program(src: &str, roots: &[&str]) -> GroundProgram {
    let mut w = World::new();
    for d in parse_module(src).unwrap().decls {
        if let Decl::Fun(g) = d {
            w = admit_group(&g, &w, &mut Yes).unwrap().0;
        }
    }
    let mut l = Lowerer::new(&w);
    for r in roots {
        l.function(r, &[]).unwrap();
    }
    l.finish()
}

fn shown(t: &Template) -> Vec<String> {
    t.entries.iter().map(|e| e.to_string()).collect()
}

#[test]
fn fact() {
    let p = program("let rec fact x = if x > 1 then x * fact (x - 1) else 1", &["fact"]);
    let t = template_for(&p, "fact").unwrap();
    assert_eq!(shown(&t), ["(fact, (x - 1), x > 1)"]);
    let y = Term::var("y", Type::Int);
    let inst = instantiate(&t, &[y]);
    assert_eq!(inst.len(), 1);
    assert_eq!(inst[0].0.to_string(), "fact (y - 1)");
    assert_eq!(inst[0].1[0].to_string(), "y > 1");
}

#[test]
fn nested_calls_share_the_path() {
    // f(x) = 1 + (if g(0) then h(g(x)) else h(42))
    let x = Term::var("x", Type::Int);
    let g = |a: Term| Term::call("g", vec![a], Type::Bool);
    let h = |a: Term| Term::call("h", vec![a], Type::Int);
    let body = Term::bin(BinOp::Add, Term::int(1), Term::ite(g(Term::int(0)), h(g(x.clone())), h(Term::int(42))));
    let t = template_of(&[(String::from("x"), Type::Int)], &body, &|f| f == "g" || f == "h");
    assert_eq!(shown(&t), ["(g, (0), true)", "(h, (g x), g 0)", "(g, (x), g 0)", "(h, (42), not (g 0))"]);
}

#[test]
fn constant_function_has_empty_template() {
    let p = program("let c (x : int) = 3", &["c"]);
    assert!(template_for(&p, "c").unwrap().entries.is_empty());
    assert!(instantiate(&template_for(&p, "c").unwrap(), &[Term::int(1)]).is_empty());
}

#[test]
fn duplicate_calls_collapse() {
    let p = program("let rec d x = if x <= 0 then 0 else d (x - 1) + d (x - 1)", &["d"]);
    assert_eq!(template_for(&p, "d").unwrap().entries.len(), 1);
}

struct Yes;

impl crate::defn::VcProver for Yes {
    fn discharge(&mut self, _: &World, _: &[String], _: &crate::defn::TerminationVC) -> Result<bool, String> {
        Ok(true)
    }
}

#[test]
fn ack_template_instantiates() {
    let src = "let rec ack m n = if m <= 0 then n + 1 else if n <= 0 then ack (m-1) 1 else ack (m-1) (ack m (n-1))";
    let w = match &parse_module(src).unwrap().decls[0] {
        Decl::Fun(g) => admit_group(g, &World::new(), &mut Yes).unwrap().0,
        _ => unreachable!(),
    };
    let mut l = Lowerer::new(&w);
    l.function("ack", &[]).unwrap();
    let p = l.finish();
    let t = template_for(&p, "ack").unwrap();
    let inst = instantiate(&t, &[Term::var("m0", Type::Int), Term::var("n0", Type::Int)]);
    let calls: Vec<String> = inst.iter().map(|(c, _)| c.to_string()).collect();
    assert_eq!(calls, ["ack (m0 - 1) 1", "ack (m0 - 1) (ack m0 (n0 - 1))", "ack m0 (n0 - 1)"]);
    for (_, path) in &inst {
        for c in path {
            assert!(c.free_vars().iter().all(|v| v == "m0" || v == "n0"));
        }
    }
}

#[test]
fn match_paths_use_testers_and_selectors() {
    let w = World::new();
    let mut l = Lowerer::new(&w);
    let name = l.function("List.length", &[Type::Int]).unwrap();
    let p = l.finish();
    let t = template_for(&p, &name).unwrap();
    assert_eq!(t.entries.len(), 1);
    let e = &t.entries[0];
    assert!(matches!(e.args()[0].kind, TermKind::Select(ref c, 1, _) if c == "Cons_int"));
    assert!(e.path.iter().any(|c| matches!(c.kind, TermKind::Not(_))));
}
