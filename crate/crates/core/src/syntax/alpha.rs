//! Alpha-equivalence on surface syntax (spans ignored).

use alloc::string::String;
use alloc::vec::Vec;

use super::ast::*;

#[derive(Default)]
struct Alpha {
    env: Vec<(String, String)>,
}

impl Alpha {
    fn var(&self, a: &str, b: &str) -> bool {
        let i = self.env.iter().rposition(|(l, _)| l == a);
        let j = self.env.iter().rposition(|(_, r)| r == b);
        match (i, j) {
            (None, None) => a == b,
            (Some(i), Some(j)) => i == j,
            _ => false,
        }
    }

    fn params(&mut self, a: &[Param], b: &[Param]) -> bool {
        if a.len() != b.len() {
            return false;
        }
        for (p, q) in a.iter().zip(b) {
            if p.ty != q.ty {
                return false;
            }
            self.env.push((p.name.clone(), q.name.clone()));
        }
        true
    }

    fn pat(&mut self, a: &Pattern, b: &Pattern) -> bool {
        match (&a.kind, &b.kind) {
            (PatternKind::Var(x), PatternKind::Var(y)) => {
                self.env.push((x.clone(), y.clone()));
                true
            }
            (PatternKind::Wildcard, PatternKind::Wildcard) => true,
            (PatternKind::Int(x), PatternKind::Int(y)) => x == y,
            (PatternKind::Bool(x), PatternKind::Bool(y)) => x == y,
            (PatternKind::Construct(c, xs), PatternKind::Construct(d, ys)) => {
                c == d && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.pat(x, y))
            }
            (PatternKind::Tuple(xs), PatternKind::Tuple(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.pat(x, y))
            }
            _ => false,
        }
    }

    fn scoped<F: FnOnce(&mut Self) -> bool>(&mut self, f: F) -> bool {
        let mark = self.env.len();
        let r = f(self);
        self.env.truncate(mark);
        r
    }

    fn expr(&mut self, a: &Expr, b: &Expr) -> bool {
        use ExprKind::*;
        match (&a.kind, &b.kind) {
            (Int(x), Int(y)) => x == y,
            (Bool(x), Bool(y)) => x == y,
            (Var(x), Var(y)) => self.var(x, y),
            (App(f, xs), App(g, ys)) => self.expr(f, g) && self.exprs(xs, ys),
            (Lambda(ps, e1), Lambda(qs, e2)) => self.scoped(|s| s.params(ps, qs) && s.expr(e1, e2)),
            (Let(x, b1, e1), Let(y, b2, e2)) => {
                self.expr(b1, b2)
                    && self.scoped(|s| {
                        s.env.push((x.clone(), y.clone()));
                        s.expr(e1, e2)
                    })
            }
            (If(c1, t1, f1), If(c2, t2, f2)) => self.expr(c1, c2) && self.expr(t1, t2) && self.expr(f1, f2),
            (Match(s1, bs1), Match(s2, bs2)) => {
                self.expr(s1, s2)
                    && bs1.len() == bs2.len()
                    && bs1
                        .iter()
                        .zip(bs2)
                        .all(|(x, y)| self.scoped(|s| s.pat(&x.pat, &y.pat) && s.expr(&x.body, &y.body)))
            }
            (Construct(c, xs), Construct(d, ys)) => c == d && self.exprs(xs, ys),
            (Tuple(xs), Tuple(ys)) => self.exprs(xs, ys),
            (BinOp(o1, l1, r1), BinOp(o2, l2, r2)) => o1 == o2 && self.expr(l1, l2) && self.expr(r1, r2),
            (Not(x), Not(y)) => self.expr(x, y),
            _ => false,
        }
    }

    fn exprs(&mut self, xs: &[Expr], ys: &[Expr]) -> bool {
        xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.expr(x, y))
    }

    fn annotations(&mut self, a: &[Annotation], b: &[Annotation]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(x, y)| match (x, y) {
                (Annotation::Measure(e1), Annotation::Measure(e2)) => self.expr(e1, e2),
                (Annotation::Adm(v1), Annotation::Adm(v2)) => {
                    v1.len() == v2.len() && v1.iter().zip(v2).all(|(p, q)| self.var(p, q))
                }
                (x, y) => x == y,
            })
    }

    fn fun_decl(&mut self, a: &FunDecl, b: &FunDecl) -> bool {
        a.name == b.name
            && a.ret == b.ret
            && self.scoped(|s| s.params(&a.params, &b.params) && s.expr(&a.body, &b.body) && s.annotations(&a.annotations, &b.annotations))
    }
}

pub fn alpha_eq_expr(a: &Expr, b: &Expr) -> bool {
    Alpha::default().expr(a, b)
}

pub fn alpha_eq_decl(a: &Decl, b: &Decl) -> bool {
    let mut al = Alpha::default();
    match (a, b) {
        (Decl::Type(x), Decl::Type(y)) => {
            x.name == y.name
                && x.params.len() == y.params.len()
                && x.ctors.len() == y.ctors.len()
                && x.ctors.iter().zip(&y.ctors).all(|(c, d)| {
                    // type parameters are bound by the declaration
                    c.name == d.name && c.args.len() == d.args.len() && c.args.iter().zip(&d.args).all(|(s, t)| ty_alpha(s, t, &x.params, &y.params))
                })
        }
        (Decl::Fun(x), Decl::Fun(y)) => {
            x.is_rec == y.is_rec && x.defs.len() == y.defs.len() && x.defs.iter().zip(&y.defs).all(|(f, g)| al.fun_decl(f, g))
        }
        (Decl::Theorem(x), Decl::Theorem(y)) => {
            x.name == y.name
                && al.scoped(|s| s.params(&x.params, &y.params) && s.expr(&x.body, &y.body))
                && al.annotations(&x.annotations, &y.annotations)
        }
        (Decl::Directive(x), Decl::Directive(y)) => {
            x.kind == y.kind && x.bound == y.bound && al.expr(&x.goal, &y.goal) && al.annotations(&x.annotations, &y.annotations)
        }
        _ => false,
    }
}

fn ty_alpha(a: &TyExpr, b: &TyExpr, pa: &[String], pb: &[String]) -> bool {
    match (a, b) {
        (TyExpr::Var(x), TyExpr::Var(y)) => {
            let i = pa.iter().position(|p| p == x);
            let j = pb.iter().position(|p| p == y);
            match (i, j) {
                (None, None) => x == y,
                (i, j) => i == j,
            }
        }
        (TyExpr::Con(n, xs), TyExpr::Con(m, ys)) => {
            n == m && xs.len() == ys.len() && xs.iter().zip(ys).all(|(s, t)| ty_alpha(s, t, pa, pb))
        }
        (TyExpr::Tuple(xs), TyExpr::Tuple(ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(s, t)| ty_alpha(s, t, pa, pb)),
        (TyExpr::Arrow(a1, b1), TyExpr::Arrow(a2, b2)) => ty_alpha(a1, a2, pa, pb) && ty_alpha(b1, b2, pa, pb),
        _ => false,
    }
}
