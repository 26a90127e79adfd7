use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::*;
use crate::syntax::{parse_module, Decl};

const ACK: &str = "let rec ack m n =\n  if m <= 0 then n + 1 else if n <= 0 then ack (m-1) 1 else ack (m-1) (ack m (n-1))\n[@@adm m,n]";
const LEFT_PAD: &str = "let rec left_pad c n xs =\n  if List.length xs >= n then xs else left_pad c n (c :: xs)\n[@@measure Ordinal.of_int (n - List.length xs)]";

/// Accepts every obligation and records what it was shown.
#[derive(Default)]
struct Recorder {
    seen: Vec<String>,
    opaque: Vec<String>,
}

impl VcProver for Recorder {
    fn discharge(&mut self, world: &World, opaque: &[String], vc: &TerminationVC) -> Result<bool, String> {
        for o in opaque {
            assert!(world.fun(o).is_some(), "clique member {} missing from the provisional world", o);
        }
        self.opaque = opaque.to_vec();
        self.seen.push(format!("{}", vc));
        Ok(true)
    }
}

fn fun_group(src: &str) -> FunGroup {
    match parse_module(src).unwrap().decls.into_iter().next().unwrap() {
        Decl::Fun(g) => g,
        _ => panic!("not a function"),
    }
}

fn typed(src: &str, w: &World) -> TypedGroup {
    typecheck::infer_group(&fun_group(src), w).unwrap()
}

fn calls_of(src: &str, w: &World) -> Vec<RecCall> {
    let g = typed(src, w);
    let names: Vec<String> = g.funs.iter().map(|f| f.name.clone()).collect();
    collect_rec_calls(&g.funs[0].name, &g.funs[0].body, &names, w)
}

fn shown(ts: &[Term]) -> Vec<String> {
    ts.iter().map(|t| t.to_string()).collect()
}

#[test]
fn ack_calls_and_guards() {
    let w = World::new();
    let cs = calls_of(ACK, &w);
    assert_eq!(cs.len(), 3);
    assert_eq!(shown(&cs[0].args), ["m - 1", "1"]);
    assert_eq!(shown(&cs[0].guard), ["not (m <= 0)", "n <= 0"]);
    // the inner call of the nested pair comes first
    assert_eq!(shown(&cs[1].args), ["m", "n - 1"]);
    assert_eq!(shown(&cs[2].args), ["m - 1", "ack m (n - 1)"]);
    for c in &cs[1..] {
        assert_eq!(shown(&c.guard), ["not (m <= 0)", "not (n <= 0)"]);
    }
}

#[test]
fn left_pad_single_call() {
    let w = World::new();
    let cs = calls_of(LEFT_PAD, &w);
    assert_eq!(cs.len(), 1);
    assert_eq!(shown(&cs[0].args), ["c", "n", "c :: xs"]);
    assert_eq!(shown(&cs[0].guard), ["not (List.length xs >= n)"]);
}

#[test]
fn non_recursive_has_no_calls() {
    let w = World::new();
    assert!(calls_of("let f x = x + 1", &w).is_empty());
}

#[test]
fn match_guards_are_equations() {
    let w = World::new();
    let cs = calls_of("let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t", &w);
    assert_eq!(cs.len(), 1);
    assert_eq!(shown(&cs[0].guard), ["l = _w1 :: t"]);
    assert!(strict_subterm(&cs[0].args[0], "l", &cs[0].guard));
    assert!(!strict_subterm(&Term::var("l", cs[0].args[0].ty.clone()), "l", &cs[0].guard));
}

#[test]
fn measures() {
    let w = World::new();
    let check = |src: &str| {
        let g = typed(src, &w);
        let cs = collect_rec_calls(&g.funs[0].name, &g.funs[0].body, &[g.funs[0].name.clone()], &w);
        elaborate_measure(&g.funs[0], &cs, &w)
    };
    assert_eq!(check("let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t").unwrap(), MeasureSpec::Structural(0));
    match check(ACK).unwrap() {
        MeasureSpec::Explicit { term, from_adm } => {
            assert_eq!(term.to_string(), "Ordinal.pair (Ordinal.of_int m) (Ordinal.of_int n)");
            assert_eq!(from_adm, Some(alloc::vec![String::from("m"), String::from("n")]));
        }
        m => panic!("{}", m),
    }
    match check(LEFT_PAD).unwrap() {
        MeasureSpec::Explicit { term, from_adm: None } => {
            assert_eq!(term.to_string(), "Ordinal.of_int (n - List.length xs)")
        }
        m => panic!("{}", m),
    }
    let adm3 = check("let rec h a b c = if a <= 0 || b <= 0 || c <= 0 then 0 else h a b (c - 1) [@@adm a,b,c]").unwrap();
    match adm3 {
        MeasureSpec::Explicit { term, .. } => assert_eq!(
            term.to_string(),
            "Ordinal.pair (Ordinal.pair (Ordinal.of_int a) (Ordinal.of_int b)) (Ordinal.of_int c)"
        ),
        m => panic!("{}", m),
    }
    assert!(matches!(check("let rec loop x = loop x"), Err(AdmissionError::NoMeasure { .. })));
    assert!(matches!(
        check("let rec f l = match l with [] -> 0 | _ :: t -> f t [@@adm l]"),
        Err(AdmissionError::BadMeasure { .. })
    ));
    assert!(matches!(check("let rec f x = if x <= 0 then 0 else f (x - 1) [@@measure x]"), Err(AdmissionError::BadMeasure { .. })));
}

#[test]
fn termination_obligations() {
    let w = World::new();
    let mut p = Recorder::default();
    let (_, rep) = admit_group(&fun_group(LEFT_PAD), &w, &mut p).unwrap();
    assert_eq!(rep.vcs.len(), 1);
    assert_eq!(
        p.seen[0],
        "{not (List.length xs >= n)} |- Ordinal.of_int (n - List.length (c :: xs)) << Ordinal.of_int (n - List.length xs)"
    );
    assert_eq!(p.opaque, ["left_pad"]);
    let mut p = Recorder::default();
    let (w2, rep) = admit_group(&fun_group(ACK), &w, &mut p).unwrap();
    assert_eq!(rep.vcs.len(), 3);
    assert_eq!(
        p.seen[0],
        "{not (m <= 0), n <= 0} |- Ordinal.pair (Ordinal.of_int (m - 1)) (Ordinal.of_int 1) << Ordinal.pair (Ordinal.of_int m) (Ordinal.of_int n)"
    );
    assert_eq!(w2.fun("ack").unwrap().certificate, Certificate::Proved(3));
}

#[test]
fn admission() {
    let w = World::new();
    let (w1, rep) = admit_group(&fun_group("let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t"), &w, &mut NoProver).unwrap();
    assert!(rep.vcs.iter().all(|v| v.kind == VcKind::Structural));
    assert_eq!(w1.fun("len").unwrap().certificate, Certificate::Structural(alloc::vec![0]));
    // refusing prover: ack is not structural
    assert!(matches!(
        admit_group(&fun_group(ACK), &w, &mut NoProver),
        Err(AdmissionError::TerminationUnproved { vc: Some(_), .. })
    ));
    assert!(matches!(
        admit_group(&fun_group("let rec loop x = loop x"), &w, &mut NoProver),
        Err(AdmissionError::TerminationUnproved { .. })
    ));
    // no integer parameter to fall back on
    assert!(matches!(
        admit_group(&fun_group("let rec spin (l : int list) = spin l"), &w, &mut Recorder::default()),
        Err(AdmissionError::TerminationUnproved { vc: None, .. })
    ));
    // redefinition is rejected by the checker
    assert!(matches!(admit_group(&fun_group("let len x = x"), &w1, &mut NoProver), Err(AdmissionError::Check(_))));
}

#[test]
fn admission_is_monotone() {
    let w = World::new();
    let (w1, _) = admit_group(&fun_group("let rec len l = match l with [] -> 0 | _ :: t -> 1 + len t"), &w, &mut NoProver).unwrap();
    let (w2, _) = admit_group(&fun_group(ACK), &w1, &mut Recorder::default()).unwrap();
    for f in w1.functions() {
        assert_eq!(w2.fun(&f.name).unwrap(), f);
    }
}

#[test]
fn mutual_structural_pair() {
    let w = World::new();
    let src = "let rec even l = match l with [] -> true | _ :: t -> odd t\nand odd l = match l with [] -> false | _ :: t -> even t";
    let (w1, rep) = admit_group(&fun_group(src), &w, &mut NoProver).unwrap();
    assert_eq!(rep.measures.len(), 2);
    assert_eq!(w1.fun("odd").unwrap().group, ["even", "odd"]);
}

#[test]
fn nested_match_tuple_guards() {
    let w = World::new();
    let src = "let rec zip a b = match a, b with (x :: s, y :: t) -> (x, y) :: zip s t | _ -> []";
    let (_, rep) = admit_group(&fun_group(src), &w, &mut NoProver).unwrap();
    assert_eq!(rep.measures[0].1, MeasureSpec::Structural(0));
    assert_eq!(rep.vcs.len(), 1);
    assert_eq!(shown(&rep.vcs[0].hyps), ["a = x :: s", "b = y :: t"]);
}

#[test]
fn integer_parameters_are_tried_as_measures() {
    let w = World::new();
    let mut p = Recorder::default();
    let (_, rep) = admit_group(&fun_group("let rec fact x = if x > 1 then x * fact (x - 1) else 1"), &w, &mut p).unwrap();
    assert_eq!(rep.measures[0].1.to_string(), "Ordinal.of_int x");
    assert_eq!(p.seen, ["{x > 1} |- Ordinal.of_int (x - 1) << Ordinal.of_int x"]);
}
