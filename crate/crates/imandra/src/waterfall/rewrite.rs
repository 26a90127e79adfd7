//! Rewrite rules and the simplifier.

use std::collections::BTreeMap;

use imandra_core::eval::Evaluator;
use imandra_core::syntax::BinOp;
use imandra_core::term::{self, Term, TermKind};
use imandra_core::types::{TySubst, Type};
use imandra_core::world::{TheoremEntry, World};

/// A conditional rewrite rule `hyps ==> lhs = rhs`, oriented left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub vars: Vec<String>,
    pub hyps: Vec<Term>,
    pub lhs: Term,
    pub rhs: Term,
}

/// Splits `not h || c` and `h1 && h2 ==> c` into hypotheses and conclusion.
pub fn split_implication(t: &Term) -> (Vec<Term>, Term) {
    let mut hyps = Vec::new();
    let mut concl = t.clone();
    while let TermKind::Bin(BinOp::Or, a, b) = &concl.kind {
        match &a.kind {
            TermKind::Not(h) => {
                push_conjuncts(h, &mut hyps);
                concl = (**b).clone();
            }
            _ => break,
        }
    }
    (hyps, concl)
}

pub fn push_conjuncts(t: &Term, out: &mut Vec<Term>) {
    match &t.kind {
        TermKind::Bin(BinOp::And, a, b) => {
            push_conjuncts(a, out);
            push_conjuncts(b, out);
        }
        TermKind::Bool(true) => {}
        _ => out.push(t.clone()),
    }
}

impl Rule {
    pub fn from_theorem(t: &TheoremEntry) -> Option<Rule> {
        let (hyps, concl) = split_implication(&t.body);
        let (lhs, rhs) = match &concl.kind {
            TermKind::Bin(BinOp::Eq, l, r) => ((**l).clone(), (**r).clone()),
            TermKind::Not(p) => ((**p).clone(), Term::bool(false)),
            _ => (concl.clone(), Term::bool(true)),
        };
        if matches!(lhs.kind, TermKind::Var(_)) || lhs.is_value() {
            return None;
        }
        let lv = lhs.free_vars();
        let ok = rhs.free_vars().is_subset(&lv) && hyps.iter().all(|h| h.free_vars().is_subset(&lv));
        ok.then(|| Rule { name: t.name.clone(), vars: t.params.iter().map(|(x, _)| x.clone()).collect(), hyps, lhs, rhs })
    }

    /// Instance of the rule at `t`: instantiated hypotheses and right-hand side.
    pub fn apply(&self, t: &Term) -> Option<(Vec<Term>, Term)> {
        let mut m = Matcher { vars: &self.vars, terms: BTreeMap::new(), types: TySubst::new() };
        if !m.term(&self.lhs, t) {
            return None;
        }
        let inst = |x: &Term| x.subst_types(&m.types).subst(&m.terms);
        Some((self.hyps.iter().map(inst).collect(), inst(&self.rhs)))
    }
}

/// Installed rules of the world.
pub fn rules_of(w: &World) -> Vec<Rule> {
    w.rules().filter_map(Rule::from_theorem).collect()
}

struct Matcher<'a> {
    vars: &'a [String],
    terms: BTreeMap<String, Term>,
    types: TySubst,
}

impl Matcher<'_> {
    fn ty(&mut self, p: &Type, t: &Type) -> bool {
        match (p, t) {
            (Type::Var(v), _) => match self.types.get(v) {
                Some(b) => b == t,
                None => {
                    self.types.insert(*v, t.clone());
                    true
                }
            },
            (Type::Adt(a, xs), Type::Adt(b, ys)) => a == b && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.ty(x, y)),
            (Type::Tuple(xs), Type::Tuple(ys)) => xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.ty(x, y)),
            (Type::Arrow(a, b), Type::Arrow(c, d)) => self.ty(a, c) && self.ty(b, d),
            _ => p == t,
        }
    }

    fn term(&mut self, p: &Term, t: &Term) -> bool {
        if let TermKind::Var(x) = &p.kind {
            if self.vars.contains(x) {
                if !self.ty(&p.ty, &t.ty) {
                    return false;
                }
                return match self.terms.get(x) {
                    Some(b) => b == t,
                    None => {
                        self.terms.insert(x.clone(), t.clone());
                        true
                    }
                };
            }
        }
        use TermKind::*;
        let ok = match (&p.kind, &t.kind) {
            (Fun(f, xs), Fun(g, ys)) => f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.ty(x, y)),
            (App(f, xs), App(g, ys)) => xs.len() == ys.len() && self.term(f, g) && self.all(xs, ys),
            (Ctor(c, xs), Ctor(d, ys)) => c == d && self.all(xs, ys),
            (Tuple(xs), Tuple(ys)) => self.all(xs, ys),
            (Bin(o, a, b), Bin(q, c, d)) => o == q && self.term(a, c) && self.term(b, d),
            (Not(a), Not(b)) => self.term(a, b),
            (If(a, b, c), If(d, e, f)) => self.term(a, d) && self.term(b, e) && self.term(c, f),
            (IsCtor(c, a), IsCtor(d, b)) => c == d && self.term(a, b),
            (Select(c, i, a), Select(d, j, b)) => c == d && i == j && self.term(a, b),
            (Proj(i, a), Proj(j, b)) => i == j && self.term(a, b),
            _ => p.kind == t.kind,
        };
        ok && self.ty(&p.ty, &t.ty)
    }

    fn all(&mut self, xs: &[Term], ys: &[Term]) -> bool {
        xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.term(x, y))
    }
}

/// Maximum rewrite steps per `simplify` call.
pub const REWRITE_CAP: usize = 512;
const HYP_DEPTH: usize = 3;
const EVAL_FUEL: u64 = 100_000;

pub struct Simplifier<'w> {
    pub world: &'w World,
    pub rules: Vec<Rule>,
    pub steps: usize,
    /// Applications per rule name.
    pub hits: BTreeMap<String, usize>,
    hyp_depth: usize,
}

impl<'w> Simplifier<'w> {
    pub fn new(world: &'w World) -> Self {
        Simplifier { world, rules: rules_of(world), steps: 0, hits: BTreeMap::new(), hyp_depth: 0 }
    }

    fn budget_left(&self) -> bool {
        self.steps < REWRITE_CAP
    }

    /// Rewrites `t` to a normal form under the hypotheses `ctx`.
    pub fn rewrite(&mut self, t: &Term, ctx: &[Term]) -> Term {
        let t = match &t.kind {
            TermKind::If(c, a, b) => {
                let c = self.rewrite(c, ctx);
                if c.is_true() {
                    return self.rewrite(a, ctx);
                }
                if c.is_false() {
                    return self.rewrite(b, ctx);
                }
                let mut ca = ctx.to_vec();
                push_conjuncts(&c, &mut ca);
                let mut cb = ctx.to_vec();
                cb.push(negate(&c));
                let a = self.rewrite(a, &ca);
                let b = self.rewrite(b, &cb);
                Term::ite(c, a, b)
            }
            TermKind::Bin(op @ (BinOp::And | BinOp::Or), a, b) => {
                let a = self.rewrite(a, ctx);
                let mut cb = ctx.to_vec();
                if *op == BinOp::And {
                    push_conjuncts(&a, &mut cb);
                } else {
                    push_conjuncts(&negate(&a), &mut cb);
                }
                let b = self.rewrite(b, &cb);
                Term::bin(*op, a, b)
            }
            TermKind::Lambda(..) => return t.clone(),
            _ => t.map_children(|c| self.rewrite(c, ctx)),
        };
        let t = term::fold_constants(&t);
        let t = bool_normalize(&t);
        if t.ty == Type::Bool && !t.is_true() && !t.is_false() {
            if ctx.contains(&t) {
                return Term::bool(true);
            }
            if ctx.contains(&negate(&t)) {
                return Term::bool(false);
            }
        }
        if !self.budget_left() {
            return t;
        }
        if let Some(r) = beta(&t) {
            self.steps += 1;
            return self.rewrite(&r, ctx);
        }
        if let Some(r) = self.eval_ground(&t) {
            self.steps += 1;
            return r;
        }
        if let Some(r) = self.unfold(&t) {
            self.steps += 1;
            return self.rewrite(&r, ctx);
        }
        if let Some(r) = hyp_equation(&t, ctx) {
            self.steps += 1;
            return self.rewrite(&r, ctx);
        }
        if let Some(r) = self.apply_rules(&t, ctx) {
            return self.rewrite(&r, ctx);
        }
        t
    }

    fn apply_rules(&mut self, t: &Term, ctx: &[Term]) -> Option<Term> {
        for i in 0..self.rules.len() {
            let Some((hyps, rhs)) = self.rules[i].apply(t) else { continue };
            if rhs == *t {
                continue;
            }
            if !hyps.is_empty() {
                if self.hyp_depth >= HYP_DEPTH {
                    continue;
                }
                self.hyp_depth += 1;
                let ok = hyps.iter().all(|h| ctx.contains(h) || self.rewrite(h, ctx).is_true());
                self.hyp_depth -= 1;
                if !ok {
                    continue;
                }
            }
            self.steps += 1;
            *self.hits.entry(self.rules[i].name.clone()).or_default() += 1;
            return Some(rhs);
        }
        None
    }

    /// Evaluates calls whose arguments are all values.
    fn eval_ground(&self, t: &Term) -> Option<Term> {
        let (f, args) = t.as_call()?;
        if !args.iter().all(Term::is_value) || self.world.fun(f).is_none() || t.ty.contains_arrow() {
            return None;
        }
        let v = Evaluator::new(self.world).with_fuel(EVAL_FUEL).eval(t, &[]).ok()?;
        Some(v.to_term(&t.ty, &|c, ty| self.world.ctor_args_at(c, ty)))
    }

    /// Opens a definition when a constructor argument decides every match in
    /// its body.
    fn unfold(&self, t: &Term) -> Option<Term> {
        let (f, args) = t.as_call()?;
        if !args.iter().any(|a| matches!(a.kind, TermKind::Ctor(..))) {
            return None;
        }
        let def = self.world.fun(f)?;
        if def.params.len() != args.len() {
            return None;
        }
        let targs = match &t.kind {
            TermKind::App(h, _) => match &h.kind {
                TermKind::Fun(_, ts) => ts.clone(),
                _ => Vec::new(),
            },
            _ => Vec::new(),
        };
        let ts: TySubst = def.scheme.vars.iter().copied().zip(targs).collect();
        let ctor_args = |c: &str, ty: &Type| self.world.ctor_args_at(c, ty);
        let body = term::flatten(&def.body.subst_types(&ts), &ctor_args);
        if !has_tests(&body) {
            return None;
        }
        let s: BTreeMap<String, Term> = def.params.iter().map(|(x, _)| x.clone()).zip(args.iter().cloned()).collect();
        let r = term::fold_constants(&body.subst(&s));
        (!has_tests(&r)).then_some(r)
    }
}

/// Right-hand side of a hypothesis `t = r`, used left to right.
fn hyp_equation(t: &Term, ctx: &[Term]) -> Option<Term> {
    if t.as_call().is_none() {
        return None;
    }
    ctx.iter().find_map(|h| match &h.kind {
        TermKind::Bin(BinOp::Eq, l, r) if **l == *t && !contains(r, t) => Some((**r).clone()),
        _ => None,
    })
}

pub fn contains(t: &Term, sub: &Term) -> bool {
    if t == sub {
        return true;
    }
    let mut found = false;
    t.for_each_child(|c| found = found || contains(c, sub));
    found
}

fn has_tests(t: &Term) -> bool {
    if matches!(t.kind, TermKind::IsCtor(..) | TermKind::Select(..)) {
        return true;
    }
    let mut found = false;
    t.for_each_child(|c| found |= has_tests(c));
    found
}

fn beta(t: &Term) -> Option<Term> {
    let TermKind::App(h, args) = &t.kind else { return None };
    let TermKind::Lambda(ps, body) = &h.kind else { return None };
    let n = ps.len().min(args.len());
    let s: BTreeMap<String, Term> = ps[..n].iter().map(|(x, _)| x.clone()).zip(args[..n].iter().cloned()).collect();
    let inner = if n < ps.len() {
        Term::new(TermKind::Lambda(ps[n..].to_vec(), body.clone()), t.ty.clone()).subst(&s)
    } else {
        body.subst(&s)
    };
    Some(if n < args.len() { Term::new(TermKind::App(Box::new(inner), args[n..].to_vec()), t.ty.clone()) } else { inner })
}

pub fn negate(t: &Term) -> Term {
    match &t.kind {
        TermKind::Not(a) => (**a).clone(),
        TermKind::Bool(b) => Term::bool(!b),
        _ => Term::not(t.clone()),
    }
}

/// Local boolean and conditional identities.
fn bool_normalize(t: &Term) -> Term {
    match &t.kind {
        TermKind::If(c, a, b) => match (&a.kind, &b.kind) {
            (TermKind::Bool(true), TermKind::Bool(false)) => (**c).clone(),
            (TermKind::Bool(false), TermKind::Bool(true)) => negate(c),
            (TermKind::Bool(true), _) if t.ty == Type::Bool => Term::bin(BinOp::Or, (**c).clone(), (**b).clone()),
            (_, TermKind::Bool(false)) if t.ty == Type::Bool => Term::bin(BinOp::And, (**c).clone(), (**a).clone()),
            _ => t.clone(),
        },
        TermKind::Bin(BinOp::Eq, a, b) => match (&a.kind, &b.kind) {
            (TermKind::Ctor(c, xs), TermKind::Ctor(d, ys)) if c != d || xs.len() != ys.len() => Term::bool(false),
            (TermKind::Ctor(_, xs), TermKind::Ctor(_, ys)) | (TermKind::Tuple(xs), TermKind::Tuple(ys)) => {
                term::fold_constants(&Term::and_all(xs.iter().zip(ys).map(|(x, y)| bool_normalize(&Term::eq(x.clone(), y.clone())))))
            }
            _ => t.clone(),
        },
        TermKind::Bin(BinOp::Or, a, b) if negate(a) == **b => Term::bool(true),
        TermKind::Bin(BinOp::And, a, b) if negate(a) == **b => Term::bool(false),
        TermKind::Bin(BinOp::And | BinOp::Or, a, b) if a == b => (**a).clone(),
        _ => t.clone(),
    }
}
