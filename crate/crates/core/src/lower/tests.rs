use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::*;
use crate::defn::{admit_group, NoProver};
use crate::syntax::{parse_expr, parse_module, Decl};
use crate::typecheck::infer_goal;

fn world_with(src: &str) -> World {
    let mut w = World::new();
    for d in parse_module(src).unwrap().decls {
        if let Decl::Fun(g) = d {
            w = admit_group(&g, &w, &mut NoProver).unwrap().0;
        }
    }
    w
}

fn lower_src(w: &World, goal: &str) -> (GroundProgram, GroundGoal) {
    let g = infer_goal(&parse_expr(goal).unwrap(), w).unwrap();
    lower_goal(w, &g).unwrap()
}

fn names(p: &GroundProgram) -> Vec<&str> {
    p.funs.iter().map(|f| f.name.as_str()).collect()
}

fn first_order(t: &Term) -> bool {
    let ok = match &t.kind {
        TermKind::Lambda(..) => false,
        TermKind::App(h, _) => matches!(h.kind, TermKind::Fun(..)),
        _ => true,
    };
    let mut all = ok && !t.ty.contains_arrow() || matches!(t.kind, TermKind::Fun(..));
    t.for_each_child(|c| {
        if !matches!(c.kind, TermKind::Fun(..)) {
            all &= first_order(c);
        }
    });
    all
}

fn is_ground_program(p: &GroundProgram) -> bool {
    p.funs.iter().all(|f| {
        f.params.iter().all(|(_, t)| t.is_ground() && !t.contains_arrow()) && f.ret.is_ground() && first_order(&f.body)
    })
}

#[test]
fn same_len() {
    let w = World::new();
    let (p, g) = lower_src(&w, "fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l");
    assert_eq!(p.types.len(), 1);
    let t = &p.types[0];
    assert_eq!(t.name, "int_list");
    let ctors: Vec<&str> = t.ctors.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(ctors, ["Nil_int", "Cons_int"]);
    assert_eq!(t.ctors[1].args, [Type::Int, Type::adt("int_list")]);
    assert_eq!(names(&p), ["length_int", "map_lambda0", "map1"]);
    assert_eq!(g.vars, [(String::from("l"), Type::adt("int_list"))]);
    assert_eq!(g.body.to_string(), "length_int (map1 l) = length_int l");
    let map1 = p.fun("map1").unwrap();
    assert_eq!(map1.params.len(), 1);
    assert!(map1.body.to_string().contains("Cons_int (map_lambda0 h, map1 t)"), "{}", map1.body);
    assert_eq!(p.fun("map_lambda0").unwrap().body.to_string(), "x + 1");
    assert!(p.fun("map1").unwrap().is_rec);
    assert!(!p.fun("map_lambda0").unwrap().is_rec);
    assert_eq!(p.fun("length_int").unwrap().source, "List.length");
    assert!(is_ground_program(&p));
}

#[test]
fn first_order_goal_has_no_definitions() {
    let w = World::new();
    let (p, g) = lower_src(&w, "fun x -> x + 0 = x");
    assert!(p.funs.is_empty() && p.types.is_empty());
    assert_eq!(g.vars, [(String::from("x"), Type::Int)]);
}

#[test]
fn monomorphic_names_are_kept() {
    let w = world_with("let rec sum l = match l with [] -> 0 | h :: t -> h + sum t");
    let (p, g) = lower_src(&w, "fun l -> sum l >= 0");
    assert_eq!(names(&p), ["sum"]);
    assert_eq!(g.body.to_string(), "sum l >= 0");
}

#[test]
fn captured_variables_become_parameters() {
    let w = World::new();
    let (p, g) = lower_src(&w, "fun y l -> List.length (List.map (fun x -> x + y) l) = List.length l");
    let lam = p.funs.iter().find(|f| f.lifted).unwrap();
    assert_eq!(lam.params.iter().map(|(x, _)| x.as_str()).collect::<Vec<_>>(), ["y", "x"]);
    let map = p.funs.iter().find(|f| f.source == "List.map" && !f.lifted).unwrap();
    assert_eq!(map.params.len(), 2);
    assert!(g.body.to_string().contains(&format!("{} y l", map.name)), "{}", g.body);
    assert!(is_ground_program(&p));
}

#[test]
fn operator_sections_and_fold() {
    let w = World::new();
    let (p, _) = lower_src(&w, "fun l -> List.fold_left (+) 0 l >= 0");
    let fold = p.funs.iter().find(|f| f.source == "List.fold_left").unwrap();
    assert_eq!(fold.params.len(), 2);
    assert!(is_ground_program(&p));
}

#[test]
fn distinct_instances_get_distinct_types() {
    let w = World::new();
    let (p, _) = lower_src(&w, "fun (a : (int * bool) list) (b : int list) -> List.length a = List.length b");
    let tys: Vec<&str> = p.types.iter().map(|t| t.name.as_str()).collect();
    assert_eq!(tys, ["int_bool_tuple_list", "int_list"]);
    let fs = names(&p);
    assert_eq!(fs.len(), 2);
    assert_ne!(fs[0], fs[1]);
}

#[test]
fn functional_parameters_are_threaded() {
    let w = world_with(
        "let twice f x = f (f x)\nlet rec apply_all f l = match l with [] -> [] | h :: t -> twice f h :: apply_all f t",
    );
    let (p, _) = lower_src(&w, "fun k l -> List.length (apply_all (fun x -> x + k) l) = List.length l");
    assert!(is_ground_program(&p));
    let apply = p.funs.iter().find(|f| f.source == "apply_all" && !f.lifted).unwrap();
    assert!(apply.is_rec, "{}", p);
    // one carried value (k) plus the list
    assert_eq!(apply.params.len(), 2);
    let twice = p.funs.iter().find(|f| f.source == "twice").unwrap();
    assert_eq!(twice.params.len(), 2);
}

#[test]
fn partial_application_and_globals_as_values() {
    let w = world_with("let add a b = a + b\nlet incr_all = List.map (add 1)");
    let (p, g) = lower_src(&w, "fun l -> List.length (incr_all l) = List.length l");
    assert!(is_ground_program(&p));
    assert!(p.fun("incr_all").is_some(), "{}", p);
    assert!(p.fun("add").is_some());
    let _ = g.to_string();
}

#[test]
fn mutual_recursion_is_copied_together() {
    let w = world_with("let rec even l = match l with [] -> true | _ :: t -> odd t\nand odd l = match l with [] -> false | _ :: t -> even t");
    let (p, _) = lower_src(&w, "fun (l : int list) -> even l || odd l");
    assert_eq!(names(&p), ["even_int", "odd_int"]);
    assert_eq!(p.fun("even_int").unwrap().group, ["even_int", "odd_int"]);
}

#[test]
fn name_clashes_are_avoided() {
    let w = world_with("let length_int x = x + 1");
    let (p, _) = lower_src(&w, "fun l -> List.length l = length_int 0");
    let fs = names(&p);
    assert!(fs.contains(&"length_int") && fs.contains(&"length_int_2"), "{:?}", fs);
}

#[test]
fn display_program() {
    let w = World::new();
    let (p, _) = lower_src(&w, "fun l -> List.length (List.map (fun x -> x + 1) l) = List.length l");
    let s = p.to_string();
    assert!(s.starts_with("type int_list = Nil_int | Cons_int of int * int_list\n"), "{}", s);
    assert!(s.contains("let map_lambda0 (x:int) = x + 1"), "{}", s);
}
