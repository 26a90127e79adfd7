//! Hindley-Milner inference with mutable unification variables.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::TypeError;
use crate::syntax::{BinOp, Expr, ExprKind, Param, Pattern, PatternKind, Span, TyExpr};
use crate::term::{Pat, Term, TermKind};
use crate::types::{TySubst, Type};
use crate::world::World;

pub(crate) struct Infer<'w> {
    pub world: &'w World,
    table: Vec<Option<Type>>,
    locals: Vec<(String, Type)>,
    /// Monomorphic types of the members of the group being checked.
    pub group: BTreeMap<String, Type>,
    /// Named type variables from annotations (`'a`).
    tyvars: BTreeMap<String, Type>,
}

type R<T> = Result<T, TypeError>;

fn err<T>(span: Span, msg: impl Into<String>) -> R<T> {
    Err(TypeError { message: msg.into(), span })
}

impl<'w> Infer<'w> {
    pub fn new(world: &'w World) -> Self {
        Infer { world, table: Vec::new(), locals: Vec::new(), group: BTreeMap::new(), tyvars: BTreeMap::new() }
    }

    pub fn fresh(&mut self) -> Type {
        self.table.push(None);
        Type::Var((self.table.len() - 1) as u32)
    }

    pub fn push_local(&mut self, x: &str, t: Type) {
        self.locals.push((x.to_string(), t));
    }

    pub fn pop_locals(&mut self, mark: usize) {
        self.locals.truncate(mark);
    }

    pub fn locals_len(&self) -> usize {
        self.locals.len()
    }

    fn shallow(&self, t: &Type) -> Type {
        let mut cur = t.clone();
        while let Type::Var(v) = cur {
            match &self.table[v as usize] {
                Some(t2) => cur = t2.clone(),
                None => break,
            }
        }
        cur
    }

    pub fn resolve(&self, t: &Type) -> Type {
        match self.shallow(t) {
            Type::Adt(n, ts) => Type::Adt(n, ts.iter().map(|t| self.resolve(t)).collect()),
            Type::Tuple(ts) => Type::Tuple(ts.iter().map(|t| self.resolve(t)).collect()),
            Type::Arrow(a, b) => Type::arrow(self.resolve(&a), self.resolve(&b)),
            t => t,
        }
    }

    fn occurs(&self, v: u32, t: &Type) -> bool {
        match self.shallow(t) {
            Type::Var(w) => v == w,
            Type::Adt(_, ts) | Type::Tuple(ts) => ts.iter().any(|t| self.occurs(v, t)),
            Type::Arrow(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            _ => false,
        }
    }

    pub fn unify(&mut self, a: &Type, b: &Type, span: Span) -> R<()> {
        let a = self.shallow(a);
        let b = self.shallow(b);
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Var(x), t) | (t, Type::Var(x)) => {
                if self.occurs(*x, t) {
                    return err(span, format!("cannot build infinite type {} = {}", self.resolve(&a), self.resolve(&b)));
                }
                self.table[*x as usize] = Some(t.clone());
                Ok(())
            }
            (Type::Int, Type::Int) | (Type::Bool, Type::Bool) => Ok(()),
            (Type::Adt(n, xs), Type::Adt(m, ys)) if n == m && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y, span)?;
                }
                Ok(())
            }
            (Type::Tuple(xs), Type::Tuple(ys)) if xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y, span)?;
                }
                Ok(())
            }
            (Type::Arrow(a1, b1), Type::Arrow(a2, b2)) => {
                self.unify(a1, a2, span)?;
                self.unify(b1, b2, span)
            }
            _ => err(span, format!("type mismatch: expected {}, found {}", self.show(&b), self.show(&a))),
        }
    }

    /// Displays a type with its unification variables renamed from `'a`.
    pub fn show(&self, t: &Type) -> Type {
        let t = self.resolve(t);
        let mut vs = Vec::new();
        t.vars_in_order(&mut vs);
        let s: TySubst = vs.iter().enumerate().map(|(i, v)| (*v, Type::Var(i as u32))).collect();
        t.subst(&s)
    }

    /// Converts an annotation; `'a` names are shared within one declaration.
    pub fn ty_expr(&mut self, t: &TyExpr, span: Span) -> R<Type> {
        Ok(match t {
            TyExpr::Var(v) => match self.tyvars.get(v) {
                Some(t) => t.clone(),
                None => {
                    let f = self.fresh();
                    self.tyvars.insert(v.clone(), f.clone());
                    f
                }
            },
            TyExpr::Con(n, args) if args.is_empty() && n == "int" => Type::Int,
            TyExpr::Con(n, args) if args.is_empty() && n == "bool" => Type::Bool,
            TyExpr::Con(n, args) => {
                let def = match self.world.type_def(n) {
                    Some(d) => d,
                    None => return err(span, format!("unknown type `{}`", n)),
                };
                if def.params.len() != args.len() {
                    return err(span, format!("type `{}` expects {} argument(s)", n, def.params.len()));
                }
                let mut ts = Vec::new();
                for a in args {
                    ts.push(self.ty_expr(a, span)?);
                }
                Type::Adt(n.clone(), ts)
            }
            TyExpr::Tuple(ts) => {
                let mut out = Vec::new();
                for a in ts {
                    out.push(self.ty_expr(a, span)?);
                }
                Type::Tuple(out)
            }
            TyExpr::Arrow(a, b) => Type::arrow(self.ty_expr(a, span)?, self.ty_expr(b, span)?),
        })
    }

    pub fn param_type(&mut self, p: &Param, span: Span) -> R<Type> {
        match &p.ty {
            Some(t) => self.ty_expr(t, span),
            None => Ok(self.fresh()),
        }
    }

    fn lookup_local(&self, x: &str) -> Option<Type> {
        self.locals.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t.clone())
    }

    /// Instantiates constructor `c` at fresh type arguments.
    fn ctor_sig(&mut self, c: &str, span: Span) -> R<(Vec<Type>, Type)> {
        let info = match self.world.ctor(c) {
            Some(i) => i.clone(),
            None => return err(span, format!("unknown constructor `{}`", c)),
        };
        let targs: Vec<Type> = (0..info.n_params).map(|_| self.fresh()).collect();
        Ok((info.arg_types(&targs), info.result_type(&targs)))
    }

    pub fn expr(&mut self, e: &Expr) -> R<Term> {
        let span = e.span;
        Ok(match &e.kind {
            ExprKind::Int(n) => Term::int(n.clone()),
            ExprKind::Bool(b) => Term::bool(*b),
            ExprKind::Var(x) => {
                if let Some(t) = self.lookup_local(x) {
                    Term::var(x.clone(), t)
                } else if let Some(t) = self.group.get(x) {
                    Term::new(TermKind::Fun(x.clone(), Vec::new()), t.clone())
                } else if let Some(f) = self.world.fun(x) {
                    let scheme = f.scheme.clone();
                    let targs: Vec<Type> = scheme.vars.iter().map(|_| self.fresh()).collect();
                    let ty = scheme.instantiate_with(&targs);
                    Term::new(TermKind::Fun(x.clone(), targs), ty)
                } else {
                    return err(span, format!("unbound identifier `{}`", x));
                }
            }
            ExprKind::App(f, args) => {
                let mut head = self.expr(f)?;
                let mut targs = Vec::new();
                for a in args {
                    targs.push(self.expr(a)?);
                }
                let ret = self.fresh();
                let want = Type::arrows(targs.iter().map(|a| a.ty.clone()).collect::<Vec<_>>(), ret.clone());
                self.unify(&head.ty, &want, span)?;
                if let TermKind::App(h, first) = head.kind {
                    let mut all = first;
                    all.extend(targs);
                    targs = all;
                    head = *h;
                }
                Term::new(TermKind::App(Box::new(head), targs), ret)
            }
            ExprKind::Lambda(ps, body) => {
                let mark = self.locals_len();
                let mut typed = Vec::new();
                for p in ps {
                    let t = self.param_type(p, span)?;
                    self.push_local(&p.name, t.clone());
                    typed.push((p.name.clone(), t));
                }
                let b = self.expr(body)?;
                self.pop_locals(mark);
                let ty = Type::arrows(typed.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>(), b.ty.clone());
                Term::new(TermKind::Lambda(typed, Box::new(b)), ty)
            }
            ExprKind::Let(x, a, b) => {
                let a = self.expr(a)?;
                let mark = self.locals_len();
                self.push_local(x, a.ty.clone());
                let b = self.expr(b)?;
                self.pop_locals(mark);
                let ty = b.ty.clone();
                Term::new(TermKind::Let(x.clone(), Box::new(a), Box::new(b)), ty)
            }
            ExprKind::If(c, t, f) => {
                let tc = self.expr(c)?;
                self.unify(&tc.ty, &Type::Bool, c.span)?;
                let tt = self.expr(t)?;
                let tf = self.expr(f)?;
                self.unify(&tf.ty, &tt.ty, f.span)?;
                Term::ite(tc, tt, tf)
            }
            ExprKind::Match(s, branches) => {
                let s = self.expr(s)?;
                let ret = self.fresh();
                let mut out = Vec::new();
                for b in branches {
                    let mark = self.locals_len();
                    let mut seen = Vec::new();
                    let p = self.pattern(&b.pat, &s.ty, &mut seen)?;
                    let body = self.expr(&b.body)?;
                    self.unify(&body.ty, &ret, b.body.span)?;
                    self.pop_locals(mark);
                    out.push((p, body));
                }
                Term::new(TermKind::Match(Box::new(s), out), ret)
            }
            ExprKind::Construct(c, args) => {
                let (want, ty) = self.ctor_sig(c, span)?;
                let args = fix_arity(c, args, want.len(), span)?;
                let mut out = Vec::new();
                for (a, t) in args.iter().zip(&want) {
                    let ta = self.expr(a)?;
                    self.unify(&ta.ty, t, a.span)?;
                    out.push(ta);
                }
                Term::new(TermKind::Ctor(c.clone(), out), ty)
            }
            ExprKind::Tuple(xs) => {
                let mut out = Vec::new();
                for x in xs {
                    out.push(self.expr(x)?);
                }
                let ty = Type::Tuple(out.iter().map(|t| t.ty.clone()).collect());
                Term::new(TermKind::Tuple(out), ty)
            }
            ExprKind::BinOp(op, a, b) => {
                let ta = self.expr(a)?;
                let tb = self.expr(b)?;
                match op {
                    BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        self.unify(&ta.ty, &Type::Int, a.span)?;
                        self.unify(&tb.ty, &Type::Int, b.span)?;
                    }
                    BinOp::And | BinOp::Or => {
                        self.unify(&ta.ty, &Type::Bool, a.span)?;
                        self.unify(&tb.ty, &Type::Bool, b.span)?;
                    }
                    BinOp::Eq => self.unify(&tb.ty, &ta.ty, span)?,
                }
                Term::bin(*op, ta, tb)
            }
            ExprKind::Not(a) => {
                let ta = self.expr(a)?;
                self.unify(&ta.ty, &Type::Bool, a.span)?;
                Term::not(ta)
            }
        })
    }

    pub fn pattern(&mut self, p: &Pattern, expected: &Type, seen: &mut Vec<String>) -> R<Pat> {
        let span = p.span;
        Ok(match &p.kind {
            PatternKind::Var(x) => {
                if seen.contains(x) {
                    return err(span, format!("variable `{}` is bound twice in this pattern", x));
                }
                seen.push(x.clone());
                self.push_local(x, expected.clone());
                Pat::Var(x.clone())
            }
            PatternKind::Wildcard => Pat::Wild,
            PatternKind::Int(n) => {
                self.unify(expected, &Type::Int, span)?;
                Pat::Int(n.clone())
            }
            PatternKind::Bool(b) => {
                self.unify(expected, &Type::Bool, span)?;
                Pat::Bool(*b)
            }
            PatternKind::Tuple(ps) => {
                let tys: Vec<Type> = ps.iter().map(|_| self.fresh()).collect();
                self.unify(expected, &Type::Tuple(tys.clone()), span)?;
                let mut out = Vec::new();
                for (q, t) in ps.iter().zip(&tys) {
                    out.push(self.pattern(q, t, seen)?);
                }
                Pat::Tuple(out)
            }
            PatternKind::Construct(c, ps) => {
                let (want, ty) = self.ctor_sig(c, span)?;
                self.unify(expected, &ty, span)?;
                let ps = fix_pat_arity(c, ps, want.len(), span)?;
                let mut out = Vec::new();
                for (q, t) in ps.iter().zip(&want) {
                    out.push(self.pattern(q, t, seen)?);
                }
                Pat::Ctor(c.clone(), out)
            }
        })
    }
}

/// Reconciles `C (a, b)` / `C ((a, b))` with the constructor's arity.
fn fix_arity(c: &str, args: &[Expr], arity: usize, span: Span) -> R<Vec<Expr>> {
    if args.len() == arity {
        return Ok(args.to_vec());
    }
    if arity > 1 && args.len() == 1 {
        if let ExprKind::Tuple(xs) = &args[0].kind {
            if xs.len() == arity {
                return Ok(xs.clone());
            }
        }
    }
    if arity == 1 && args.len() > 1 {
        return Ok(vec![Expr::new(ExprKind::Tuple(args.to_vec()), span)]);
    }
    err(span, format!("constructor `{}` expects {} argument(s), got {}", c, arity, args.len()))
}

fn fix_pat_arity(c: &str, ps: &[Pattern], arity: usize, span: Span) -> R<Vec<Pattern>> {
    if ps.len() == arity {
        return Ok(ps.to_vec());
    }
    if ps.len() == 1 {
        match &ps[0].kind {
            PatternKind::Tuple(xs) if xs.len() == arity => return Ok(xs.clone()),
            PatternKind::Wildcard => return Ok(vec![Pattern::synth(PatternKind::Wildcard); arity]),
            _ => {}
        }
    }
    if arity == 1 && ps.len() > 1 {
        return Ok(vec![Pattern { kind: PatternKind::Tuple(ps.to_vec()), span }]);
    }
    err(span, format!("constructor `{}` expects {} argument(s), got {}", c, arity, ps.len()))
}
