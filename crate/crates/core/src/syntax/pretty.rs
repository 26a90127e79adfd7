use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::ast::*;

const P_TOP: u8 = 0;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_CMP: u8 = 4;
const P_CONS: u8 = 5;
const P_ADD: u8 = 6;
const P_MUL: u8 = 7;
const P_UNARY: u8 = 8;
const P_APP: u8 = 9;
const P_ATOM: u8 = 10;

pub fn pretty_module(m: &SourceModule) -> String {
    let mut out = String::new();
    for d in &m.decls {
        out.push_str(&pretty(d));
        out.push_str("\n\n");
    }
    out
}

pub fn pretty(d: &Decl) -> String {
    let mut out = String::new();
    match d {
        Decl::Type(t) => {
            out.push_str("type ");
            match t.params.len() {
                0 => {}
                1 => {
                    let _ = write!(out, "'{} ", t.params[0]);
                }
                _ => {
                    let ps: Vec<String> = t.params.iter().map(|p| format!("'{}", p)).collect();
                    let _ = write!(out, "({}) ", ps.join(", "));
                }
            }
            out.push_str(&t.name);
            out.push_str(" =");
            for (i, c) in t.ctors.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { " | " });
                out.push_str(&c.name);
                if !c.args.is_empty() {
                    out.push_str(" of ");
                    let args: Vec<String> = c.args.iter().map(|a| ty_prec(a, 2)).collect();
                    out.push_str(&args.join(" * "));
                }
            }
        }
        Decl::Fun(g) => {
            for (i, f) in g.defs.iter().enumerate() {
                if i == 0 {
                    out.push_str(if g.is_rec { "let rec " } else { "let " });
                } else {
                    out.push_str("\nand ");
                }
                out.push_str(&f.name);
                params(&mut out, &f.params);
                if let Some(r) = &f.ret {
                    let _ = write!(out, " : {}", pretty_type(r));
                }
                out.push_str(" =\n  ");
                out.push_str(&expr_str(&f.body, P_TOP, true));
                annotations(&mut out, &f.annotations);
            }
        }
        Decl::Theorem(t) => {
            let _ = write!(out, "theorem {}", t.name);
            params(&mut out, &t.params);
            out.push_str(" =\n  ");
            out.push_str(&expr_str(&t.body, P_TOP, true));
            annotations(&mut out, &t.annotations);
        }
        Decl::Directive(dir) => {
            out.push_str(match dir.kind {
                DirectiveKind::Verify => "verify",
                DirectiveKind::Instance => "instance",
            });
            if let Some(b) = dir.bound {
                let _ = write!(out, " upto {}", b);
            }
            let _ = write!(out, " ({})", expr_str(&dir.goal, P_TOP, true));
            annotations(&mut out, &dir.annotations);
        }
    }
    out
}

fn params(out: &mut String, ps: &[Param]) {
    for p in ps {
        match &p.ty {
            Some(t) => {
                let _ = write!(out, " ({} : {})", p.name, pretty_type(t));
            }
            None => {
                let _ = write!(out, " {}", p.name);
            }
        }
    }
}

fn annotations(out: &mut String, anns: &[Annotation]) {
    for a in anns {
        match a {
            Annotation::Adm(vs) => {
                let _ = write!(out, "\n[@@adm {}]", vs.join(", "));
            }
            Annotation::Measure(e) => {
                let _ = write!(out, "\n[@@measure {}]", expr_str(e, P_TOP, true));
            }
            Annotation::Auto => out.push_str(" [@@auto]"),
            Annotation::Rewrite => out.push_str(" [@@rewrite]"),
        }
    }
}

pub fn pretty_type(t: &TyExpr) -> String {
    ty_prec(t, 0)
}

// 0: arrow, 1: tuple component, 2: application argument
fn ty_prec(t: &TyExpr, ctx: u8) -> String {
    match t {
        TyExpr::Var(v) => format!("'{}", v),
        TyExpr::Con(n, args) => match args.len() {
            0 => n.clone(),
            1 => format!("{} {}", ty_prec(&args[0], 3), n),
            _ => {
                let a: Vec<String> = args.iter().map(|a| ty_prec(a, 0)).collect();
                format!("({}) {}", a.join(", "), n)
            }
        },
        TyExpr::Tuple(ts) => {
            let a: Vec<String> = ts.iter().map(|a| ty_prec(a, 2)).collect();
            let s = a.join(" * ");
            if ctx >= 1 {
                format!("({})", s)
            } else {
                s
            }
        }
        TyExpr::Arrow(a, b) => {
            let s = format!("{} -> {}", ty_prec(a, 1), ty_prec(b, 0));
            if ctx >= 1 {
                format!("({})", s)
            } else {
                s
            }
        }
    }
}

pub fn pretty_expr(e: &Expr) -> String {
    expr_str(e, P_TOP, true)
}

fn is_prefix_form(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Lambda(..) | ExprKind::Let(..) | ExprKind::If(..) | ExprKind::Match(..))
}

fn paren(s: String, need: bool) -> String {
    if need {
        format!("({})", s)
    } else {
        s
    }
}

fn list_items(e: &Expr) -> Option<Vec<&Expr>> {
    let mut items = Vec::new();
    let mut cur = e;
    loop {
        match &cur.kind {
            ExprKind::Construct(c, args) if c == "[]" && args.is_empty() => return Some(items),
            ExprKind::Construct(c, args) if c == "::" && args.len() == 2 => {
                items.push(&args[0]);
                cur = &args[1];
            }
            _ => return None,
        }
    }
}

/// `ctx` is the minimum precedence the surrounding context accepts; `tail`
/// is true when an unparenthesised prefix form cannot swallow later tokens.
fn expr_str(e: &Expr, ctx: u8, tail: bool) -> String {
    if is_prefix_form(e) && !(tail && ctx == P_TOP) {
        return format!("({})", expr_str(e, P_TOP, true));
    }
    match &e.kind {
        ExprKind::Int(n) => {
            if n.sign() == num_bigint::Sign::Minus {
                format!("({})", n)
            } else {
                n.to_string()
            }
        }
        ExprKind::Bool(b) => b.to_string(),
        ExprKind::Var(v) => v.clone(),
        ExprKind::App(f, args) => {
            let mut s = expr_str(f, P_ATOM, false);
            for a in args {
                s.push(' ');
                s.push_str(&expr_str(a, P_ATOM, false));
            }
            paren(s, ctx > P_APP)
        }
        ExprKind::Lambda(ps, body) => {
            let mut s = String::from("fun");
            params(&mut s, ps);
            s.push_str(" -> ");
            s.push_str(&expr_str(body, P_TOP, true));
            s
        }
        ExprKind::Let(x, bound, body) => {
            format!("let {} = {} in\n  {}", x, expr_str(bound, P_TOP, true), expr_str(body, P_TOP, true))
        }
        ExprKind::If(c, t, f) => format!(
            "if {} then {} else {}",
            expr_str(c, P_TOP, true),
            expr_str(t, P_TOP, true),
            expr_str(f, P_TOP, true)
        ),
        ExprKind::Match(scrut, branches) => {
            let mut s = format!("match {} with", expr_str(scrut, P_TOP, true));
            for (i, b) in branches.iter().enumerate() {
                let last = i + 1 == branches.len();
                let _ = write!(
                    s,
                    "\n  | {} -> {}",
                    pretty_pattern(&b.pat),
                    expr_str(&b.body, P_TOP, last)
                );
            }
            s
        }
        ExprKind::Construct(c, args) => {
            if c == "[]" && args.is_empty() {
                return "[]".into();
            }
            if c == "::" && args.len() == 2 {
                if let Some(items) = list_items(e) {
                    let parts: Vec<String> = items.iter().map(|x| expr_str(x, P_OR, false)).collect();
                    return format!("[{}]", parts.join("; "));
                }
                let s = format!("{} :: {}", expr_str(&args[0], P_CONS + 1, false), expr_str(&args[1], P_CONS, false));
                return paren(s, ctx > P_CONS);
            }
            match args.len() {
                0 => c.clone(),
                1 if !matches!(args[0].kind, ExprKind::Tuple(_)) => {
                    paren(format!("{} {}", c, expr_str(&args[0], P_ATOM, false)), ctx > P_APP)
                }
                _ => {
                    let parts: Vec<String> = args.iter().map(|x| expr_str(x, P_OR, false)).collect();
                    paren(format!("{} ({})", c, parts.join(", ")), ctx > P_APP)
                }
            }
        }
        ExprKind::Tuple(items) => {
            let parts: Vec<String> = items.iter().map(|x| expr_str(x, P_OR, false)).collect();
            format!("({})", parts.join(", "))
        }
        ExprKind::BinOp(op, a, b) => {
            let p = match op {
                BinOp::Or => P_OR,
                BinOp::And => P_AND,
                BinOp::Eq | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => P_CMP,
                BinOp::Add | BinOp::Sub => P_ADD,
                BinOp::Mul => P_MUL,
            };
            let (lp, rp) = match op {
                BinOp::Or | BinOp::And => (p + 1, p),
                _ if op.is_compare() || *op == BinOp::Eq => (p + 1, p + 1),
                _ => (p, p + 1),
            };
            let s = format!("{} {} {}", expr_str(a, lp, false), op.symbol(), expr_str(b, rp, false));
            paren(s, ctx > p)
        }
        ExprKind::Not(a) => paren(format!("not {}", expr_str(a, P_ATOM, false)), ctx > P_UNARY),
    }
}

pub fn pretty_pattern(p: &Pattern) -> String {
    pat_str(p, 0)
}

// 0: top (tuples allowed bare), 1: cons operand, 2: constructor argument
fn pat_str(p: &Pattern, ctx: u8) -> String {
    match &p.kind {
        PatternKind::Var(v) => v.clone(),
        PatternKind::Wildcard => "_".into(),
        PatternKind::Int(n) => {
            if n.sign() == num_bigint::Sign::Minus {
                format!("({})", n)
            } else {
                n.to_string()
            }
        }
        PatternKind::Bool(b) => b.to_string(),
        PatternKind::Tuple(ps) => {
            let parts: Vec<String> = ps.iter().map(|x| pat_str(x, 1)).collect();
            format!("({})", parts.join(", "))
        }
        PatternKind::Construct(c, args) => {
            if c == "[]" && args.is_empty() {
                return "[]".into();
            }
            if c == "::" && args.len() == 2 {
                let s = format!("{} :: {}", pat_str(&args[0], 2), pat_str(&args[1], 1));
                return if ctx >= 2 { format!("({})", s) } else { s };
            }
            match args.len() {
                0 => c.clone(),
                1 if !matches!(args[0].kind, PatternKind::Tuple(_)) => {
                    let s = format!("{} {}", c, pat_str(&args[0], 2));
                    if ctx >= 2 {
                        format!("({})", s)
                    } else {
                        s
                    }
                }
                _ => {
                    let parts: Vec<String> = args.iter().map(|x| pat_str(x, 1)).collect();
                    let s = format!("{} ({})", c, parts.join(", "));
                    if ctx >= 2 {
                        format!("({})", s)
                    } else {
                        s
                    }
                }
            }
        }
    }
}
