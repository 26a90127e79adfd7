use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;

use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;

const ACK: &str = "let rec ack m n =
  if m <= 0 then n + 1 else if n <= 0 then ack (m-1) 1 else ack (m-1) (ack m (n-1))
[@@adm m,n]";

const LEFT_PAD: &str = "let rec left_pad c n xs =
  if List.length xs >= n then xs else left_pad c n (c :: xs)
[@@measure Ordinal.of_int (n - List.length xs)]";

const SAME_LEN: &str = "theorem same_len l =
  List.length (List.map (fun x -> x + 1) l) = List.length l";

fn single_fun(src: &str) -> FunDecl {
    let m = parse_module(src).unwrap();
    assert_eq!(m.decls.len(), 1);
    match &m.decls[0] {
        Decl::Fun(g) => g.defs[0].clone(),
        d => panic!("expected a function, got {:?}", d),
    }
}

fn var(x: &str) -> Expr {
    Expr::synth(ExprKind::Var(x.into()))
}

#[test]
fn ack_has_adm() {
    let f = single_fun(ACK);
    assert_eq!(f.name, "ack");
    assert_eq!(f.params.len(), 2);
    assert_eq!(f.annotations, vec![Annotation::Adm(vec!["m".into(), "n".into()])]);
}

#[test]
fn empty_module() {
    assert!(parse_module("").unwrap().decls.is_empty());
    assert!(parse_module("  (* only a comment (* nested *) *) ;;").unwrap().decls.is_empty());
}

#[test]
fn left_pad_has_measure() {
    let f = single_fun(LEFT_PAD);
    match &f.annotations[..] {
        [Annotation::Measure(e)] => {
            let expected = parse_expr("Ordinal.of_int (n - List.length xs)").unwrap();
            assert!(alpha_eq_expr(e, &expected));
        }
        other => panic!("unexpected annotations {:?}", other),
    }
}

#[test]
fn local_open_qualifies_members() {
    let e = parse_expr("Ordinal.(pair (of_int m) (of_int n))").unwrap();
    let expected = parse_expr("Ordinal.pair (Ordinal.of_int m) (Ordinal.of_int n)").unwrap();
    assert!(alpha_eq_expr(&e, &expected));
}

#[test]
fn precedence_and_desugaring() {
    let e = parse_expr("a + b * c = d && not p || q ==> r").unwrap();
    let expected = Expr::synth(ExprKind::BinOp(
        BinOp::Or,
        Box::new(Expr::synth(ExprKind::Not(Box::new(parse_expr("(a + b * c = d && not p) || q").unwrap())))),
        Box::new(var("r")),
    ));
    assert!(alpha_eq_expr(&e, &expected), "{}", pretty_expr(&e));
    let l = parse_expr("[1; 2]").unwrap();
    assert!(alpha_eq_expr(&l, &parse_expr("1 :: 2 :: []").unwrap()));
    let ne = parse_expr("x <> y").unwrap();
    assert!(alpha_eq_expr(&ne, &parse_expr("not (x = y)").unwrap()));
    assert!(parse_expr("a < b < c").is_err());
}

#[test]
fn function_sugar_becomes_params() {
    let f = single_fun("let rec len = function [] -> 0 | _ :: t -> 1 + len t");
    assert_eq!(f.params.len(), 1);
    assert!(matches!(f.body.kind, ExprKind::Match(..)));
}

#[test]
fn directives_and_theorems() {
    let m = parse_module(&[SAME_LEN, "[@@auto]", "verify upto 10 (fun l -> List.rev (List.rev l) = l)", "instance (fun x -> x > 3)"].join("\n")).unwrap();
    assert_eq!(m.decls.len(), 3);
    match &m.decls[0] {
        Decl::Theorem(t) => assert_eq!(t.annotations, vec![Annotation::Auto]),
        _ => panic!(),
    }
    match &m.decls[1] {
        Decl::Directive(d) => {
            assert_eq!(d.kind, DirectiveKind::Verify);
            assert_eq!(d.bound, Some(10));
        }
        _ => panic!(),
    }
}

#[test]
fn type_decls() {
    let m = parse_module("type 'a tree = Leaf | Node of 'a tree * 'a * 'a tree\ntype ('a, 'b) p = P of ('a * 'b)").unwrap();
    match &m.decls[0] {
        Decl::Type(t) => {
            assert_eq!(t.params, vec!["a".to_string()]);
            assert_eq!(t.ctors[1].args.len(), 3);
        }
        _ => panic!(),
    }
    match &m.decls[1] {
        Decl::Type(t) => assert_eq!(t.ctors[0].args.len(), 1),
        _ => panic!(),
    }
}

#[test]
fn errors_carry_positions() {
    let e = parse_module("let f x =\n  x +").unwrap_err();
    assert_eq!(e.line, 2);
    assert!(e.is_incomplete());
    let e = parse_module("let = 3").unwrap_err();
    assert_eq!((e.line, e.col), (1, 5));
    assert!(!e.is_incomplete());
}

#[test]
fn corpus_round_trips() {
    let src = [
        ACK,
        LEFT_PAD,
        SAME_LEN,
        "type nat = Z | S of nat",
        "let rec f x = match x with | (0, y) -> y | (n, _) -> n",
    ];
    for s in &src {
        let m = parse_module(s).unwrap();
        for d in &m.decls {
            let text = pretty(d);
            let back = parse_module(&text).unwrap_or_else(|e| panic!("{}\n{}", text, e));
            assert!(alpha_eq_decl(d, &back.decls[0]), "{}", text);
        }
    }
    assert_eq!(pretty_expr(&parse_expr("verify_me (0 = 0)").unwrap()), "verify_me (0 = 0)");
}

#[test]
fn spans_within_input() {
    fn check(e: &Expr, len: usize) {
        assert!(e.span.start <= e.span.end && e.span.end <= len, "{:?}", e.span);
        match &e.kind {
            ExprKind::App(f, xs) => {
                check(f, len);
                xs.iter().for_each(|x| check(x, len));
            }
            ExprKind::Lambda(_, b) | ExprKind::Not(b) => check(b, len),
            ExprKind::Let(_, a, b) | ExprKind::BinOp(_, a, b) => {
                check(a, len);
                check(b, len);
            }
            ExprKind::If(a, b, c) => {
                check(a, len);
                check(b, len);
                check(c, len);
            }
            ExprKind::Match(s, bs) => {
                check(s, len);
                bs.iter().for_each(|b| check(&b.body, len));
            }
            ExprKind::Construct(_, xs) | ExprKind::Tuple(xs) => xs.iter().for_each(|x| check(x, len)),
            _ => {}
        }
    }
    for s in [ACK, LEFT_PAD, SAME_LEN] {
        for d in parse_module(s).unwrap().decls {
            assert!(d.span().end <= s.len());
            match d {
                Decl::Fun(g) => g.defs.iter().for_each(|f| check(&f.body, s.len())),
                Decl::Theorem(t) => check(&t.body, s.len()),
                _ => {}
            }
        }
    }
}

// ------------------------------------------------------------ generators

const NAMES: &[&str] = &["x", "y", "z", "f", "xs"];
const CTORS: &[&str] = &["A", "B", "Ordinal.Int"];

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(NAMES).prop_map(String::from)
}

fn pattern() -> impl Strategy<Value = Pattern> {
    let leaf = prop_oneof![
        name().prop_map(|x| Pattern::synth(PatternKind::Var(x))),
        Just(Pattern::synth(PatternKind::Wildcard)),
        (-5i64..5).prop_map(|n| Pattern::synth(PatternKind::Int(BigInt::from(n)))),
        any::<bool>().prop_map(|b| Pattern::synth(PatternKind::Bool(b))),
        Just(Pattern::synth(PatternKind::Construct("[]".into(), vec![]))),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Pattern::synth(PatternKind::Construct("::".into(), vec![a, b]))),
            (prop::sample::select(CTORS), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(c, xs)| Pattern::synth(PatternKind::Construct(c.into(), xs))),
            prop::collection::vec(inner, 2..4).prop_map(|xs| Pattern::synth(PatternKind::Tuple(xs))),
        ]
    })
}

fn binop() -> impl Strategy<Value = BinOp> {
    prop::sample::select(vec![
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Eq,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
    ])
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-20i64..20).prop_map(|n| Expr::synth(ExprKind::Int(BigInt::from(n)))),
        any::<bool>().prop_map(|b| Expr::synth(ExprKind::Bool(b))),
        name().prop_map(|x| Expr::synth(ExprKind::Var(x))),
        Just(Expr::synth(ExprKind::Construct("[]".into(), vec![]))),
        Just(Expr::synth(ExprKind::Var("List.length".into()))),
    ];
    leaf.prop_recursive(4, 40, 4, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            (inner.clone().prop_filter("constructor head", |f| !matches!(f.kind, ExprKind::Construct(..))), prop::collection::vec(inner.clone(), 1..3))
                .prop_map(move |(f, xs)| Expr::synth(ExprKind::App(b(f), xs))),
            (prop::collection::vec(name(), 1..3), inner.clone()).prop_map(move |(ps, e)| {
                Expr::synth(ExprKind::Lambda(ps.into_iter().map(Param::untyped).collect(), b(e)))
            }),
            (name(), inner.clone(), inner.clone()).prop_map(move |(x, a, c)| Expr::synth(ExprKind::Let(x, b(a), b(c)))),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(move |(c, t, e)| Expr::synth(ExprKind::If(b(c), b(t), b(e)))),
            (inner.clone(), prop::collection::vec((pattern(), inner.clone()), 1..3)).prop_map(move |(s, bs)| {
                Expr::synth(ExprKind::Match(b(s), bs.into_iter().map(|(pat, body)| Branch { pat, body }).collect()))
            }),
            (prop::sample::select(CTORS), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(c, xs)| Expr::synth(ExprKind::Construct(c.into(), xs))),
            (inner.clone(), inner.clone()).prop_map(|(a, c)| Expr::synth(ExprKind::Construct("::".into(), vec![a, c]))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(|xs| Expr::synth(ExprKind::Tuple(xs))),
            (binop(), inner.clone(), inner.clone()).prop_map(move |(op, x, y)| Expr::synth(ExprKind::BinOp(op, b(x), b(y)))),
            inner.prop_map(move |x| Expr::synth(ExprKind::Not(b(x)))),
        ]
    })
}

fn decl() -> impl Strategy<Value = Decl> {
    let fun = (any::<bool>(), prop::collection::vec(name(), 0..3), expr(), prop::option::of(prop::sample::select(vec!["m", "n"]))).prop_map(
        |(is_rec, ps, body, adm)| {
            // a leading lambda would be absorbed into the parameter list
            let body = match body.kind {
                ExprKind::Lambda(..) => Expr::synth(ExprKind::Tuple(vec![body.clone(), body])),
                _ => body,
            };
            let annotations = adm.map(|a| vec![Annotation::Adm(vec![a.into(), "x".into()])]).unwrap_or_default();
            Decl::Fun(FunGroup {
                is_rec,
                defs: vec![FunDecl {
                    name: "g".into(),
                    params: ps.into_iter().map(Param::untyped).collect(),
                    ret: None,
                    body,
                    annotations,
                    span: Span::default(),
                }],
                span: Span::default(),
            })
        },
    );
    let dir = (any::<bool>(), prop::option::of(0u64..50), expr(), any::<bool>()).prop_map(|(v, bound, goal, auto)| {
        Decl::Directive(Directive {
            kind: if v { DirectiveKind::Verify } else { DirectiveKind::Instance },
            goal,
            bound,
            annotations: if auto { vec![Annotation::Auto] } else { vec![] },
            span: Span::default(),
        })
    });
    let thm = (expr(), any::<bool>()).prop_map(|(body, rw)| {
        Decl::Theorem(TheoremDecl {
            name: "t".into(),
            params: vec![Param::untyped(String::from("x"))],
            body,
            annotations: if rw { vec![Annotation::Rewrite] } else { vec![Annotation::Measure(var("x"))] },
            span: Span::default(),
        })
    });
    prop_oneof![fun, dir, thm]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn pretty_round_trips(d in decl()) {
        let text = pretty(&d);
        let m = parse_module(&text);
        prop_assert!(m.is_ok(), "{}\n{:?}", text, m);
        let m = m.unwrap();
        prop_assert_eq!(m.decls.len(), 1);
        prop_assert!(alpha_eq_decl(&d, &m.decls[0]), "{}\n---\n{}", text, pretty(&m.decls[0]));
    }

    #[test]
    fn parser_is_total(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let text = String::from_utf8_lossy(&bytes);
        let _ = parse_module(&text);
    }

    #[test]
    fn parser_is_total_on_token_soup(toks in prop::collection::vec(prop::sample::select(vec![
        "let", "rec", "(", ")", "x", "=", "if", "then", "else", "match", "with", "|", "->", "1", "::", "[", "]",
        ";", "fun", "[@@adm", "[@@measure", ",", "verify", "upto", "Ordinal.(", "*)", "(*", "-", "A", "'a", "type", "of",
    ]), 0..40)) {
        let text = toks.join(" ");
        if let Err(e) = parse_module(&text) {
            prop_assert!(e.offset <= text.len());
        }
    }
}
