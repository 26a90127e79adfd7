//! Induction schemes read off recursion templates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use imandra_core::template::{self, Template};
use imandra_core::term::{self, Term, TermKind};
use imandra_core::types::{TySubst, Type};
use imandra_core::world::World;

use super::rewrite::{negate, push_conjuncts};
use super::GoalState;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductionCase {
    pub hyps: Vec<Term>,
    /// Instances of the goal formula.
    pub ihs: Vec<Term>,
    pub concl: Term,
    /// The induction call in this case and the calls its hypotheses stand
    /// for, after constructor instantiation. Empty for structural schemes.
    pub call: Option<Term>,
    pub ih_calls: Vec<Term>,
    /// Constructor instantiations applied to the goal variables.
    pub bindings: Vec<(String, Term)>,
}

impl InductionCase {
    /// The case as a goal: hypotheses, then induction hypotheses.
    pub fn goal(&self, depth: usize) -> GoalState {
        let mut hyps = self.hyps.clone();
        hyps.extend(self.ihs.iter().cloned());
        GoalState { hyps, concl: self.concl.clone(), depth, history: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeKind {
    /// Follows the recursion of a call in the goal.
    Recursion(Term),
    /// Structural induction on a variable.
    Structural(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InductionScheme {
    pub kind: SchemeKind,
    pub cases: Vec<InductionCase>,
}

impl fmt::Display for InductionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SchemeKind::Recursion(c) => write!(f, "induction following {}", c)?,
            SchemeKind::Structural(x) => write!(f, "structural induction on {}", x)?,
        }
        for (i, c) in self.cases.iter().enumerate() {
            let mut parts: Vec<String> = c.bindings.iter().map(|(x, t)| format!("{} := {}", x, t)).collect();
            parts.extend(c.hyps.iter().map(|h| h.to_string()));
            write!(f, "\n  case {}: [{}] with {} induction hypothesis(es)", i + 1, parts.join("; "), c.ihs.len())?;
        }
        Ok(())
    }
}

/// Template of a recursive source function, over its parameters.
pub fn source_template(w: &World, f: &str) -> Option<Template> {
    let def = w.fun(f)?;
    if !def.is_rec {
        return None;
    }
    let ctor_args = |c: &str, ty: &Type| w.ctor_args_at(c, ty);
    let body = term::flatten(&term::short_circuit_to_if(&def.body), &ctor_args);
    Some(template::template_of(&def.params, &body, &|g| w.fun(g).is_some()))
}

fn type_args(call: &Term) -> Vec<Type> {
    match &call.kind {
        TermKind::App(h, _) => match &h.kind {
            TermKind::Fun(_, ts) => ts.clone(),
            _ => Vec::new(),
        },
        _ => Vec::new(),
    }
}

struct Candidate {
    call: Term,
    /// Positions the recursion changes.
    changing: Vec<usize>,
    /// (path, recursive-call arguments) per self-call entry, over the actuals.
    entries: Vec<(Vec<Term>, Vec<Term>)>,
}

fn candidate(w: &World, call: &Term) -> Option<Candidate> {
    let (f, actuals) = call.as_call()?;
    let def = w.fun(f)?;
    let tpl = source_template(w, f)?;
    let ts: TySubst = def.scheme.vars.iter().copied().zip(type_args(call)).collect();
    let params: BTreeSet<String> = def.params.iter().map(|(x, _)| x.clone()).collect();
    let own: Vec<_> = tpl
        .entries
        .iter()
        .filter(|e| e.callee() == f && e.args().len() == actuals.len())
        .filter(|e| e.call.free_vars().is_subset(&params) && e.path.iter().all(|p| p.free_vars().is_subset(&params)))
        .collect();
    if own.is_empty() {
        return None;
    }
    let changing: Vec<usize> = (0..actuals.len())
        .filter(|&i| own.iter().any(|e| !matches!(&e.args()[i].kind, TermKind::Var(x) if *x == def.params[i].0)))
        .collect();
    if changing.is_empty() {
        return None;
    }
    let mut vars = BTreeSet::new();
    for &i in &changing {
        match &actuals[i].kind {
            TermKind::Var(x) if vars.insert(x.clone()) => {}
            _ => return None,
        }
    }
    for (j, a) in actuals.iter().enumerate() {
        if !changing.contains(&j) && a.free_vars().iter().any(|x| vars.contains(x)) {
            return None;
        }
    }
    let s: BTreeMap<String, Term> = def.params.iter().map(|(x, _)| x.clone()).zip(actuals.iter().cloned()).collect();
    let entries = own
        .iter()
        .map(|e| {
            let path = e.path.iter().map(|p| term::fold_constants(&p.subst_types(&ts).subst(&s))).collect();
            let args = e.args().iter().map(|a| a.subst_types(&ts).subst(&s)).collect();
            (path, args)
        })
        .collect();
    Some(Candidate { call: call.clone(), changing, entries })
}

/// Builds an induction scheme for the goal, or `None` when it has neither a
/// suitable recursive call nor a datatype variable.
pub fn synthesize_induction(g: &GoalState, w: &World) -> Option<InductionScheme> {
    let formula = g.formula();
    let mut calls = Vec::new();
    term::calls_in(&formula, &mut calls);
    let cands: Vec<Candidate> = calls.iter().filter_map(|c| candidate(w, c)).collect();
    let score = |c: &Candidate| {
        let vs: BTreeSet<String> = c.changing.iter().flat_map(|&i| c.call.as_call().unwrap().1[i].free_vars()).collect();
        calls.iter().filter(|d| d.free_vars().iter().any(|x| vs.contains(x))).count()
    };
    let mut best: Option<(usize, &Candidate)> = None;
    for c in &cands {
        let s = score(c);
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, c));
        }
    }
    match best {
        Some((_, c)) => Some(recursion_scheme(g, w, c)),
        None => structural_scheme(g, w),
    }
}

fn recursion_scheme(g: &GoalState, w: &World, c: &Candidate) -> InductionScheme {
    let formula = g.formula();
    let actuals = c.call.as_call().unwrap().1.to_vec();
    let mut groups: Vec<(Vec<Term>, Vec<Vec<Term>>)> = Vec::new();
    for (path, args) in &c.entries {
        match groups.iter_mut().find(|(p, _)| p == path) {
            Some((_, xs)) => xs.push(args.clone()),
            None => groups.push((path.clone(), vec![args.clone()])),
        }
    }
    let head = match &c.call.kind {
        TermKind::App(h, _) => (**h).clone(),
        _ => unreachable!("a call"),
    };
    let mut cases = Vec::new();
    for (path, arg_lists) in &groups {
        let mut hyps = g.hyps.clone();
        hyps.extend(path.iter().cloned());
        let mut ihs = Vec::new();
        let mut ih_calls = Vec::new();
        for args in arg_lists {
            let s: BTreeMap<String, Term> = c
                .changing
                .iter()
                .map(|&i| match &actuals[i].kind {
                    TermKind::Var(x) => (x.clone(), args[i].clone()),
                    _ => unreachable!("checked by candidate"),
                })
                .collect();
            ihs.push(formula.subst(&s));
            ih_calls.push(Term::new(TermKind::App(Box::new(head.clone()), args.clone()), c.call.ty.clone()));
        }
        cases.push(instantiate(w, InductionCase { hyps, ihs, concl: g.concl.clone(), call: Some(c.call.clone()), ih_calls, bindings: Vec::new() }));
    }
    let mut hyps = g.hyps.clone();
    for (path, _) in &groups {
        let mut conj = Vec::new();
        for p in path {
            push_conjuncts(p, &mut conj);
        }
        hyps.push(negate(&term::fold_constants(&Term::and_all(conj))));
    }
    cases.push(instantiate(w, InductionCase { hyps, ihs: Vec::new(), concl: g.concl.clone(), call: Some(c.call.clone()), ih_calls: Vec::new(), bindings: Vec::new() }));
    InductionScheme { kind: SchemeKind::Recursion(c.call.clone()), cases }
}

fn structural_scheme(g: &GoalState, w: &World) -> Option<InductionScheme> {
    let formula = g.formula();
    let vars = formula.free_vars_typed();
    let (x, ty) = vars.iter().find(|(_, t)| !w.ctors_of(t).is_empty())?;
    let mut avoid = formula.free_vars();
    let mut cases = Vec::new();
    for (c, args) in w.ctors_of(ty) {
        let fields: Vec<Term> = args
            .iter()
            .map(|t| {
                let n = term::fresh_name(x, &avoid);
                avoid.insert(n.clone());
                Term::var(n, t.clone())
            })
            .collect();
        let ihs = fields
            .iter()
            .filter(|v| v.ty == *ty)
            .map(|v| formula.subst(&BTreeMap::from([(x.clone(), v.clone())])))
            .collect();
        let v = Term::new(TermKind::Ctor(c, fields), ty.clone());
        let s = BTreeMap::from([(x.clone(), v.clone())]);
        let hyps = g.hyps.iter().map(|h| term::fold_constants(&h.subst(&s))).collect();
        let concl = term::fold_constants(&g.concl.subst(&s));
        cases.push(InductionCase { hyps, ihs, concl, call: None, ih_calls: Vec::new(), bindings: vec![(x.clone(), v)] });
    }
    Some(InductionScheme { kind: SchemeKind::Structural(x.clone()), cases })
}

/// Replaces variables fixed to one constructor by a case hypothesis with that
/// constructor applied to fresh variables.
fn instantiate(w: &World, mut case: InductionCase) -> InductionCase {
    loop {
        let mut avoid = BTreeSet::new();
        for t in case.hyps.iter().chain(&case.ihs).chain([&case.concl]) {
            avoid.extend(t.free_vars());
        }
        let found = case.hyps.iter().find_map(|h| ctor_fix(w, h));
        let Some((x, ty, c)) = found else { break };
        let fields: Vec<Term> = w
            .ctor_args_at(&c, &ty)
            .into_iter()
            .map(|t| {
                let n = term::fresh_name(&x, &avoid);
                avoid.insert(n.clone());
                Term::var(n, t)
            })
            .collect();
        let v = Term::new(TermKind::Ctor(c, fields), ty);
        let s = BTreeMap::from([(x.clone(), v.clone())]);
        let mut bindings: Vec<(String, Term)> = case.bindings.iter().map(|(y, t)| (y.clone(), term::fold_constants(&t.subst(&s)))).collect();
        bindings.push((x, v));
        let app = |t: &Term| term::fold_constants(&t.subst(&s));
        let mut hyps = Vec::new();
        for h in &case.hyps {
            let h = app(h);
            if !h.is_true() {
                push_conjuncts(&h, &mut hyps);
            }
        }
        case = InductionCase {
            hyps,
            ihs: case.ihs.iter().map(app).collect(),
            concl: app(&case.concl),
            call: case.call.as_ref().map(app),
            ih_calls: case.ih_calls.iter().map(app).collect(),
            bindings,
        };
    }
    case
}

fn ctor_fix(w: &World, h: &Term) -> Option<(String, Type, String)> {
    match &h.kind {
        TermKind::IsCtor(c, v) => match &v.kind {
            TermKind::Var(x) => Some((x.clone(), v.ty.clone(), c.clone())),
            _ => None,
        },
        TermKind::Not(inner) => match &inner.kind {
            TermKind::IsCtor(c, v) => match &v.kind {
                TermKind::Var(x) => {
                    let cs = w.ctors_of(&v.ty);
                    if cs.len() != 2 {
                        return None;
                    }
                    let other = cs.into_iter().find(|(d, _)| d != c)?.0;
                    Some((x.clone(), v.ty.clone(), other))
                }
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}
