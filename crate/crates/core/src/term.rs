//! Typed core terms shared by admission, lowering, templates, evaluation and
//! the prover.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::syntax::{self, BinOp, Expr, ExprKind, Param, Pattern, PatternKind};
use crate::types::{TySubst, Type};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Term {
    pub kind: TermKind,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TermKind {
    Int(BigInt),
    Bool(bool),
    /// Local variable (parameter, pattern/let binding, or free goal variable).
    Var(String),
    /// Global function reference with its type arguments.
    Fun(String, Vec<Type>),
    App(Box<Term>, Vec<Term>),
    Lambda(Vec<(String, Type)>, Box<Term>),
    Let(String, Box<Term>, Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    Match(Box<Term>, Vec<(Pat, Term)>),
    Ctor(String, Vec<Term>),
    Tuple(Vec<Term>),
    Bin(BinOp, Box<Term>, Box<Term>),
    Not(Box<Term>),
    /// Constructor tester, produced by match compilation.
    IsCtor(String, Box<Term>),
    /// i-th field of a constructor, produced by match compilation.
    Select(String, usize, Box<Term>),
    /// i-th component of a tuple.
    Proj(usize, Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pat {
    Var(String),
    Wild,
    Ctor(String, Vec<Pat>),
    Tuple(Vec<Pat>),
    Int(BigInt),
    Bool(bool),
}

impl Pat {
    pub fn bound_vars(&self, out: &mut Vec<String>) {
        match self {
            Pat::Var(v) => out.push(v.clone()),
            Pat::Ctor(_, ps) | Pat::Tuple(ps) => ps.iter().for_each(|p| p.bound_vars(out)),
            _ => {}
        }
    }

    pub fn rename(&self, from: &str, to: &str) -> Pat {
        match self {
            Pat::Var(v) if v == from => Pat::Var(to.to_string()),
            Pat::Ctor(c, ps) => Pat::Ctor(c.clone(), ps.iter().map(|p| p.rename(from, to)).collect()),
            Pat::Tuple(ps) => Pat::Tuple(ps.iter().map(|p| p.rename(from, to)).collect()),
            _ => self.clone(),
        }
    }

    pub fn is_irrefutable(&self) -> bool {
        match self {
            Pat::Var(_) | Pat::Wild => true,
            Pat::Tuple(ps) => ps.iter().all(Pat::is_irrefutable),
            _ => false,
        }
    }

    pub fn to_pattern(&self) -> Pattern {
        let kind = match self {
            Pat::Var(v) => PatternKind::Var(v.clone()),
            Pat::Wild => PatternKind::Wildcard,
            Pat::Ctor(c, ps) => PatternKind::Construct(c.clone(), ps.iter().map(Pat::to_pattern).collect()),
            Pat::Tuple(ps) => PatternKind::Tuple(ps.iter().map(Pat::to_pattern).collect()),
            Pat::Int(n) => PatternKind::Int(n.clone()),
            Pat::Bool(b) => PatternKind::Bool(*b),
        };
        Pattern::synth(kind)
    }
}

impl Term {
    pub fn new(kind: TermKind, ty: Type) -> Self {
        Term { kind, ty }
    }

    pub fn int(n: impl Into<BigInt>) -> Self {
        Term::new(TermKind::Int(n.into()), Type::Int)
    }

    pub fn bool(b: bool) -> Self {
        Term::new(TermKind::Bool(b), Type::Bool)
    }

    pub fn var(name: impl Into<String>, ty: Type) -> Self {
        Term::new(TermKind::Var(name.into()), ty)
    }

    /// Saturated call of a monomorphic global function.
    pub fn call(name: impl Into<String>, args: Vec<Term>, ret: Type) -> Self {
        let fty = Type::arrows(args.iter().map(|a| a.ty.clone()).collect::<Vec<_>>(), ret.clone());
        let head = Term::new(TermKind::Fun(name.into(), Vec::new()), fty);
        if args.is_empty() {
            return Term::new(head.kind, ret);
        }
        Term::new(TermKind::App(Box::new(head), args), ret)
    }

    pub fn bin(op: BinOp, a: Term, b: Term) -> Self {
        let ty = if op.is_arith() { Type::Int } else { Type::Bool };
        Term::new(TermKind::Bin(op, Box::new(a), Box::new(b)), ty)
    }

    pub fn eq(a: Term, b: Term) -> Self {
        Term::bin(BinOp::Eq, a, b)
    }

    pub fn not(a: Term) -> Self {
        Term::new(TermKind::Not(Box::new(a)), Type::Bool)
    }

    pub fn ite(c: Term, t: Term, e: Term) -> Self {
        let ty = t.ty.clone();
        Term::new(TermKind::If(Box::new(c), Box::new(t), Box::new(e)), ty)
    }

    pub fn and_all(ts: impl IntoIterator<Item = Term>) -> Term {
        let mut items: Vec<Term> = ts.into_iter().collect();
        match items.len() {
            0 => Term::bool(true),
            _ => {
                let mut acc = items.pop().unwrap();
                while let Some(t) = items.pop() {
                    acc = Term::bin(BinOp::And, t, acc);
                }
                acc
            }
        }
    }

    pub fn implies(h: Term, c: Term) -> Term {
        Term::bin(BinOp::Or, Term::not(h), c)
    }

    pub fn is_true(&self) -> bool {
        matches!(self.kind, TermKind::Bool(true))
    }

    pub fn is_false(&self) -> bool {
        matches!(self.kind, TermKind::Bool(false))
    }

    /// `Some((name, args))` when the term is a saturated call of a global.
    pub fn as_call(&self) -> Option<(&str, &[Term])> {
        match &self.kind {
            TermKind::App(h, args) => match &h.kind {
                TermKind::Fun(f, _) => Some((f.as_str(), args.as_slice())),
                _ => None,
            },
            TermKind::Fun(f, _) if !self.ty.is_arrow() => Some((f.as_str(), &[])),
            _ => None,
        }
    }

    /// Values built only from literals, constructors and tuples.
    pub fn is_value(&self) -> bool {
        match &self.kind {
            TermKind::Int(_) | TermKind::Bool(_) => true,
            TermKind::Ctor(_, xs) | TermKind::Tuple(xs) => xs.iter().all(Term::is_value),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 1;
        self.for_each_child(|c| n += c.size());
        n
    }

    pub fn for_each_child(&self, mut f: impl FnMut(&Term)) {
        match &self.kind {
            TermKind::Int(_) | TermKind::Bool(_) | TermKind::Var(_) | TermKind::Fun(..) => {}
            TermKind::App(h, args) => {
                f(h);
                args.iter().for_each(f);
            }
            TermKind::Lambda(_, b) | TermKind::Not(b) | TermKind::IsCtor(_, b) | TermKind::Select(_, _, b) | TermKind::Proj(_, b) => f(b),
            TermKind::Let(_, a, b) | TermKind::Bin(_, a, b) => {
                f(a);
                f(b);
            }
            TermKind::If(c, t, e) => {
                f(c);
                f(t);
                f(e);
            }
            TermKind::Match(s, bs) => {
                f(s);
                bs.iter().for_each(|(_, b)| f(b));
            }
            TermKind::Ctor(_, xs) | TermKind::Tuple(xs) => xs.iter().for_each(f),
        }
    }

    /// Rebuilds the term with `f` applied to each direct child (binders untouched).
    pub fn map_children(&self, mut f: impl FnMut(&Term) -> Term) -> Term {
        let kind = match &self.kind {
            TermKind::Int(_) | TermKind::Bool(_) | TermKind::Var(_) | TermKind::Fun(..) => self.kind.clone(),
            TermKind::App(h, args) => TermKind::App(Box::new(f(h)), args.iter().map(&mut f).collect()),
            TermKind::Lambda(ps, b) => TermKind::Lambda(ps.clone(), Box::new(f(b))),
            TermKind::Let(x, a, b) => TermKind::Let(x.clone(), Box::new(f(a)), Box::new(f(b))),
            TermKind::If(c, t, e) => TermKind::If(Box::new(f(c)), Box::new(f(t)), Box::new(f(e))),
            TermKind::Match(s, bs) => {
                TermKind::Match(Box::new(f(s)), bs.iter().map(|(p, b)| (p.clone(), f(b))).collect())
            }
            TermKind::Ctor(c, xs) => TermKind::Ctor(c.clone(), xs.iter().map(&mut f).collect()),
            TermKind::Tuple(xs) => TermKind::Tuple(xs.iter().map(&mut f).collect()),
            TermKind::Bin(op, a, b) => TermKind::Bin(*op, Box::new(f(a)), Box::new(f(b))),
            TermKind::Not(a) => TermKind::Not(Box::new(f(a))),
            TermKind::IsCtor(c, a) => TermKind::IsCtor(c.clone(), Box::new(f(a))),
            TermKind::Select(c, i, a) => TermKind::Select(c.clone(), *i, Box::new(f(a))),
            TermKind::Proj(i, a) => TermKind::Proj(*i, Box::new(f(a))),
        };
        Term::new(kind, self.ty.clone())
    }

    pub fn map_types(&self, f: &impl Fn(&Type) -> Type) -> Term {
        let kind = match &self.kind {
            TermKind::Fun(n, args) => TermKind::Fun(n.clone(), args.iter().map(f).collect()),
            TermKind::Lambda(ps, b) => {
                TermKind::Lambda(ps.iter().map(|(x, t)| (x.clone(), f(t))).collect(), Box::new(b.map_types(f)))
            }
            _ => self.map_children(|c| c.map_types(f)).kind,
        };
        Term::new(kind, f(&self.ty))
    }

    pub fn subst_types(&self, s: &TySubst) -> Term {
        self.map_types(&|t| t.subst(s))
    }

    /// Free local variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        self.free_vars_typed().into_iter().map(|(x, _)| x).collect()
    }

    /// Free local variables with their types, in first-occurrence order.
    pub fn free_vars_typed(&self) -> Vec<(String, Type)> {
        let mut out: Vec<(String, Type)> = Vec::new();
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut Vec<(String, Type)>) {
            match &t.kind {
                TermKind::Var(x) => {
                    if !bound.contains(x) && !out.iter().any(|(y, _)| y == x) {
                        out.push((x.clone(), t.ty.clone()));
                    }
                }
                TermKind::Lambda(ps, b) => {
                    let mark = bound.len();
                    bound.extend(ps.iter().map(|(x, _)| x.clone()));
                    go(b, bound, out);
                    bound.truncate(mark);
                }
                TermKind::Let(x, a, b) => {
                    go(a, bound, out);
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                TermKind::Match(s, bs) => {
                    go(s, bound, out);
                    for (p, b) in bs {
                        let mark = bound.len();
                        p.bound_vars(bound);
                        go(b, bound, out);
                        bound.truncate(mark);
                    }
                }
                _ => t.for_each_child(|c| go(c, bound, out)),
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn mentions_var(&self, x: &str) -> bool {
        self.free_vars().contains(x)
    }

    /// Names of all global functions referenced.
    pub fn global_refs(&self, out: &mut BTreeSet<String>) {
        if let TermKind::Fun(f, _) = &self.kind {
            out.insert(f.clone());
        }
        self.for_each_child(|c| c.global_refs(out));
    }

    /// Capture-avoiding substitution of local variables.
    pub fn subst(&self, s: &BTreeMap<String, Term>) -> Term {
        if s.is_empty() {
            return self.clone();
        }
        let mut avoid = BTreeSet::new();
        for t in s.values() {
            avoid.extend(t.free_vars());
        }
        self.subst_avoiding(s, &avoid)
    }

    fn subst_avoiding(&self, s: &BTreeMap<String, Term>, avoid: &BTreeSet<String>) -> Term {
        match &self.kind {
            TermKind::Var(x) => match s.get(x) {
                Some(t) => t.clone(),
                None => self.clone(),
            },
            TermKind::Lambda(ps, b) => {
                let mut s2 = s.clone();
                let mut body = (**b).clone();
                let mut new_ps = Vec::new();
                for (x, t) in ps {
                    s2.remove(x);
                    let x2 = if avoid.contains(x) {
                        let fresh = fresh_name(x, &body.all_names_with(avoid));
                        body = body.rename_free(x, &fresh);
                        fresh
                    } else {
                        x.clone()
                    };
                    new_ps.push((x2, t.clone()));
                }
                Term::new(TermKind::Lambda(new_ps, Box::new(body.subst_avoiding(&s2, avoid))), self.ty.clone())
            }
            TermKind::Let(x, a, b) => {
                let a2 = a.subst_avoiding(s, avoid);
                let mut s2 = s.clone();
                s2.remove(x);
                let (x2, body) = if avoid.contains(x) {
                    let fresh = fresh_name(x, &b.all_names_with(avoid));
                    (fresh.clone(), b.rename_free(x, &fresh))
                } else {
                    (x.clone(), (**b).clone())
                };
                Term::new(TermKind::Let(x2, Box::new(a2), Box::new(body.subst_avoiding(&s2, avoid))), self.ty.clone())
            }
            TermKind::Match(scrut, bs) => {
                let scrut2 = scrut.subst_avoiding(s, avoid);
                let mut out = Vec::new();
                for (p, b) in bs {
                    let mut vars = Vec::new();
                    p.bound_vars(&mut vars);
                    let mut s2 = s.clone();
                    let mut p2 = p.clone();
                    let mut body = b.clone();
                    for x in &vars {
                        s2.remove(x);
                        if avoid.contains(x) {
                            let fresh = fresh_name(x, &body.all_names_with(avoid));
                            body = body.rename_free(x, &fresh);
                            p2 = p2.rename(x, &fresh);
                        }
                    }
                    out.push((p2, body.subst_avoiding(&s2, avoid)));
                }
                Term::new(TermKind::Match(Box::new(scrut2), out), self.ty.clone())
            }
            _ => self.map_children(|c| c.subst_avoiding(s, avoid)),
        }
    }

    fn all_names_with(&self, extra: &BTreeSet<String>) -> BTreeSet<String> {
        let mut names = extra.clone();
        self.all_names(&mut names);
        names
    }

    fn all_names(&self, out: &mut BTreeSet<String>) {
        match &self.kind {
            TermKind::Var(x) => {
                out.insert(x.clone());
            }
            TermKind::Lambda(ps, _) => out.extend(ps.iter().map(|(x, _)| x.clone())),
            TermKind::Let(x, _, _) => {
                out.insert(x.clone());
            }
            TermKind::Match(_, bs) => {
                for (p, _) in bs {
                    let mut v = Vec::new();
                    p.bound_vars(&mut v);
                    out.extend(v);
                }
            }
            _ => {}
        }
        self.for_each_child(|c| c.all_names(out));
    }

    pub fn rename_free(&self, from: &str, to: &str) -> Term {
        let mut s = BTreeMap::new();
        s.insert(from.to_string(), Term::var(to, Type::Int));
        // keep the original type on the renamed occurrences
        self.rename_free_typed(&s)
    }

    fn rename_free_typed(&self, s: &BTreeMap<String, Term>) -> Term {
        match &self.kind {
            TermKind::Var(x) => match s.get(x) {
                Some(t) => Term::new(t.kind.clone(), self.ty.clone()),
                None => self.clone(),
            },
            TermKind::Lambda(ps, _) if ps.iter().any(|(x, _)| s.contains_key(x)) => self.clone(),
            TermKind::Let(x, a, b) if s.contains_key(x) => {
                Term::new(TermKind::Let(x.clone(), Box::new(a.rename_free_typed(s)), b.clone()), self.ty.clone())
            }
            TermKind::Match(scrut, bs) => {
                let scrut2 = scrut.rename_free_typed(s);
                let out = bs
                    .iter()
                    .map(|(p, b)| {
                        let mut vars = Vec::new();
                        p.bound_vars(&mut vars);
                        if vars.iter().any(|v| s.contains_key(v)) {
                            (p.clone(), b.clone())
                        } else {
                            (p.clone(), b.rename_free_typed(s))
                        }
                    })
                    .collect();
                Term::new(TermKind::Match(Box::new(scrut2), out), self.ty.clone())
            }
            _ => self.map_children(|c| c.rename_free_typed(s)),
        }
    }

    /// Converts back to surface syntax for printing.
    pub fn to_expr(&self) -> Expr {
        let kind = match &self.kind {
            TermKind::Int(n) => ExprKind::Int(n.clone()),
            TermKind::Bool(b) => ExprKind::Bool(*b),
            TermKind::Var(x) => ExprKind::Var(x.clone()),
            TermKind::Fun(f, _) => ExprKind::Var(f.clone()),
            TermKind::App(h, args) => ExprKind::App(Box::new(h.to_expr()), args.iter().map(Term::to_expr).collect()),
            TermKind::Lambda(ps, b) => {
                ExprKind::Lambda(ps.iter().map(|(x, _)| Param::untyped(x.clone())).collect(), Box::new(b.to_expr()))
            }
            TermKind::Let(x, a, b) => ExprKind::Let(x.clone(), Box::new(a.to_expr()), Box::new(b.to_expr())),
            TermKind::If(c, t, e) => ExprKind::If(Box::new(c.to_expr()), Box::new(t.to_expr()), Box::new(e.to_expr())),
            TermKind::Match(s, bs) => ExprKind::Match(
                Box::new(s.to_expr()),
                bs.iter().map(|(p, b)| syntax::Branch { pat: p.to_pattern(), body: b.to_expr() }).collect(),
            ),
            TermKind::Ctor(c, xs) => ExprKind::Construct(c.clone(), xs.iter().map(Term::to_expr).collect()),
            TermKind::Tuple(xs) => ExprKind::Tuple(xs.iter().map(Term::to_expr).collect()),
            TermKind::Bin(op, a, b) => ExprKind::BinOp(*op, Box::new(a.to_expr()), Box::new(b.to_expr())),
            TermKind::Not(a) => ExprKind::Not(Box::new(a.to_expr())),
            TermKind::IsCtor(c, a) => {
                ExprKind::App(Box::new(Expr::synth(ExprKind::Var(format!("is_{}", c)))), vec![a.to_expr()])
            }
            TermKind::Select(c, i, a) => {
                ExprKind::App(Box::new(Expr::synth(ExprKind::Var(format!("{}#{}", c, i)))), vec![a.to_expr()])
            }
            TermKind::Proj(i, a) => {
                ExprKind::App(Box::new(Expr::synth(ExprKind::Var(format!("proj#{}", i)))), vec![a.to_expr()])
            }
        };
        Expr::synth(kind)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&syntax::pretty_expr(&self.to_expr()))
    }
}

pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "x" } else { stem };
    let mut k = 1usize;
    loop {
        let cand = format!("{}{}", stem, k);
        if !avoid.contains(&cand) {
            return cand;
        }
        k += 1;
    }
}

/// Substitutes `let` bindings away (call-by-name inlining).
pub fn inline_lets(t: &Term) -> Term {
    match &t.kind {
        TermKind::Let(x, a, b) => {
            let a2 = inline_lets(a);
            let mut s = BTreeMap::new();
            s.insert(x.clone(), a2);
            inline_lets(&b.subst(&s))
        }
        _ => t.map_children(inline_lets),
    }
}

/// Condition under which `pat` matches `scrut`, as a list of conjuncts, plus
/// the bindings of pattern variables to selector terms.
pub fn pattern_condition(pat: &Pat, scrut: &Term, conds: &mut Vec<Term>, binds: &mut BTreeMap<String, Term>, ctor_args: &dyn Fn(&str, &Type) -> Vec<Type>) {
    match pat {
        Pat::Wild => {}
        Pat::Var(x) => {
            binds.insert(x.clone(), scrut.clone());
        }
        Pat::Int(n) => conds.push(Term::eq(scrut.clone(), Term::int(n.clone()))),
        Pat::Bool(true) => conds.push(scrut.clone()),
        Pat::Bool(false) => conds.push(Term::not(scrut.clone())),
        Pat::Tuple(ps) => {
            let tys = match &scrut.ty {
                Type::Tuple(ts) => ts.clone(),
                _ => vec![Type::Int; ps.len()],
            };
            for (i, p) in ps.iter().enumerate() {
                let sel = Term::new(TermKind::Proj(i, Box::new(scrut.clone())), tys[i].clone());
                pattern_condition(p, &sel, conds, binds, ctor_args);
            }
        }
        Pat::Ctor(c, ps) => {
            conds.push(Term::new(TermKind::IsCtor(c.clone(), Box::new(scrut.clone())), Type::Bool));
            let tys = ctor_args(c, &scrut.ty);
            for (i, p) in ps.iter().enumerate() {
                let ty = tys.get(i).cloned().unwrap_or(Type::Int);
                let sel = Term::new(TermKind::Select(c.clone(), i, Box::new(scrut.clone())), ty);
                pattern_condition(p, &sel, conds, binds, ctor_args);
            }
        }
    }
}

/// Two patterns that can never match the same value.
pub fn patterns_disjoint(a: &Pat, b: &Pat) -> bool {
    match (a, b) {
        (Pat::Ctor(c, xs), Pat::Ctor(d, ys)) => c != d || xs.iter().zip(ys).any(|(x, y)| patterns_disjoint(x, y)),
        (Pat::Tuple(xs), Pat::Tuple(ys)) => xs.iter().zip(ys).any(|(x, y)| patterns_disjoint(x, y)),
        (Pat::Int(x), Pat::Int(y)) => x != y,
        (Pat::Bool(x), Pat::Bool(y)) => x != y,
        _ => false,
    }
}

/// Removes `let` and `match`: lets are inlined and matches become chains of
/// `if` over constructor testers, with pattern variables replaced by selector
/// terms. The result has no binders other than lambdas.
pub fn flatten(t: &Term, ctor_args: &dyn Fn(&str, &Type) -> Vec<Type>) -> Term {
    match &t.kind {
        TermKind::Let(x, a, b) => {
            let a2 = flatten(a, ctor_args);
            let mut s = BTreeMap::new();
            s.insert(x.clone(), a2);
            flatten(&b.subst(&s), ctor_args)
        }
        TermKind::Match(scrut, bs) => {
            let scrut = flatten(scrut, ctor_args);
            let mut arms = Vec::new();
            for (p, body) in bs {
                let mut conds = Vec::new();
                let mut binds = BTreeMap::new();
                pattern_condition(p, &scrut, &mut conds, &mut binds, ctor_args);
                arms.push((Term::and_all(conds), flatten(&body.subst(&binds), ctor_args)));
            }
            let (_, last) = arms.pop().expect("match with no branches");
            arms.into_iter().rev().fold(last, |acc, (c, b)| Term::ite(c, b, acc))
        }
        _ => t.map_children(|c| flatten(c, ctor_args)),
    }
}

/// Rewrites `a && b` to `if a then b else false` and `a || b` to
/// `if a then true else b`.
pub fn short_circuit_to_if(t: &Term) -> Term {
    match &t.kind {
        TermKind::Bin(BinOp::And, a, b) => Term::ite(short_circuit_to_if(a), short_circuit_to_if(b), Term::bool(false)),
        TermKind::Bin(BinOp::Or, a, b) => Term::ite(short_circuit_to_if(a), Term::bool(true), short_circuit_to_if(b)),
        _ => t.map_children(short_circuit_to_if),
    }
}

/// Bottom-up constant folding over literals, constructors and tuples.
pub fn fold_constants(t: &Term) -> Term {
    let t = t.map_children(fold_constants);
    let folded = match &t.kind {
        TermKind::Bin(op, a, b) => fold_bin(*op, a, b),
        TermKind::Not(a) => match &a.kind {
            TermKind::Bool(b) => Some(Term::bool(!b)),
            TermKind::Not(inner) => Some((**inner).clone()),
            _ => None,
        },
        TermKind::If(c, x, y) => match &c.kind {
            TermKind::Bool(true) => Some((**x).clone()),
            TermKind::Bool(false) => Some((**y).clone()),
            _ if x == y => Some((**x).clone()),
            _ => None,
        },
        TermKind::IsCtor(c, a) => match &a.kind {
            TermKind::Ctor(d, _) => Some(Term::bool(c == d)),
            _ => None,
        },
        TermKind::Select(c, i, a) => match &a.kind {
            TermKind::Ctor(d, xs) if c == d => xs.get(*i).cloned(),
            _ => None,
        },
        TermKind::Proj(i, a) => match &a.kind {
            TermKind::Tuple(xs) => xs.get(*i).cloned(),
            _ => None,
        },
        _ => None,
    };
    folded.unwrap_or(t)
}

fn fold_bin(op: BinOp, a: &Term, b: &Term) -> Option<Term> {
    use TermKind::*;
    match (&a.kind, &b.kind) {
        (Int(x), Int(y)) => Some(match op {
            BinOp::Add => Term::int(x + y),
            BinOp::Sub => Term::int(x - y),
            BinOp::Mul => Term::int(x * y),
            BinOp::Eq => Term::bool(x == y),
            BinOp::Lt => Term::bool(x < y),
            BinOp::Le => Term::bool(x <= y),
            BinOp::Gt => Term::bool(x > y),
            BinOp::Ge => Term::bool(x >= y),
            _ => return None,
        }),
        (Bool(x), _) if op == BinOp::And => Some(if *x { b.clone() } else { Term::bool(false) }),
        (Bool(x), _) if op == BinOp::Or => Some(if *x { Term::bool(true) } else { b.clone() }),
        (_, Bool(y)) if op == BinOp::And => Some(if *y { a.clone() } else { return None }),
        (_, Bool(y)) if op == BinOp::Or => Some(if *y { return None } else { a.clone() }),
        (Int(x), _) if x.is_zero() && op == BinOp::Add => Some(b.clone()),
        (_, Int(y)) if y.is_zero() && matches!(op, BinOp::Add | BinOp::Sub) => Some(a.clone()),
        _ if op == BinOp::Eq && a.is_value() && b.is_value() => Some(Term::bool(a == b)),
        _ if op == BinOp::Eq && a == b => Some(Term::bool(true)),
        _ => None,
    }
}

/// Saturated global calls occurring in `t` (pre-order, duplicates kept).
pub fn calls_in(t: &Term, out: &mut Vec<Term>) {
    if t.as_call().is_some() {
        out.push(t.clone());
    }
    match &t.kind {
        TermKind::App(h, args) if matches!(h.kind, TermKind::Fun(..)) => args.iter().for_each(|a| calls_in(a, out)),
        _ => t.for_each_child(|c| calls_in(c, out)),
    }
}

pub fn is_negative(n: &BigInt) -> bool {
    n.is_negative()
}
