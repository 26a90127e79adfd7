//! The definitional principle: recursive calls with their guards, measures,
//! termination conditions and admission into the world.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::{Annotation, BinOp, FunGroup, TypeDecl};
use crate::term::{self, Pat, Term, TermKind};
use crate::typecheck::{self, CheckError, TypedFun, TypedGroup, TypedTheorem};
use crate::types::{self, Type};
use crate::world::{Certificate, FunEntry, TheoremEntry, World};

/// A call to a member of the recursion clique, with the path condition in
/// force at the call site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecCall {
    pub caller: String,
    pub callee: String,
    pub args: Vec<Term>,
    pub guard: Vec<Term>,
}

impl fmt::Display for RecCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args.iter().map(|a| format!("{}", a)).collect();
        let guard: Vec<String> = self.guard.iter().map(|g| format!("{}", g)).collect();
        write!(f, "{} ({}) under {{{}}}", self.callee, args.join(", "), guard.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureSpec {
    /// Constructor-count size of the given parameter.
    Structural(usize),
    /// An `Ordinal.t`-valued term over the parameters. `from_adm` records the
    /// `[@@adm]` names it was elaborated from.
    Explicit { term: Term, from_adm: Option<Vec<String>> },
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::Structural(i) => write!(f, "structural on parameter {}", i + 1),
            MeasureSpec::Explicit { term, from_adm: Some(vs) } => write!(f, "{} (from [@@adm {}])", term, vs.join(", ")),
            MeasureSpec::Explicit { term, .. } => write!(f, "{}", term),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VcKind {
    /// `lhs` is a strict subterm of `rhs`; checked syntactically.
    Structural,
    /// `hyps ==> Ordinal.lt lhs rhs`.
    Ordinal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminationVC {
    pub kind: VcKind,
    pub call: RecCall,
    pub hyps: Vec<Term>,
    pub lhs: Term,
    pub rhs: Term,
}

impl TerminationVC {
    /// The obligation as a boolean term.
    pub fn goal(&self) -> Term {
        let lt = Term::call("Ordinal.lt", vec![self.lhs.clone(), self.rhs.clone()], Type::Bool);
        if self.hyps.is_empty() {
            lt
        } else {
            Term::implies(Term::and_all(self.hyps.clone()), lt)
        }
    }

    /// Free variables of the obligation with their types.
    pub fn vars(&self) -> Vec<(String, Type)> {
        self.goal().free_vars_typed()
    }
}

impl fmt::Display for TerminationVC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hyps: Vec<String> = self.hyps.iter().map(|h| format!("{}", h)).collect();
        match self.kind {
            VcKind::Structural => write!(f, "{{{}}} |- {} is a strict subterm of {}", hyps.join(", "), self.lhs, self.rhs),
            VcKind::Ordinal => write!(f, "{{{}}} |- {} << {}", hyps.join(", "), self.lhs, self.rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdmissionError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error("no measure found for `{name}`: {reason}")]
    NoMeasure { name: String, reason: String },
    #[error("bad measure for `{name}`: {reason}")]
    BadMeasure { name: String, reason: String },
    #[error("termination of `{name}` not proved{}: {reason}", vc.as_ref().map(|v| format!(" (obligation {})", v)).unwrap_or_default())]
    TerminationUnproved { name: String, vc: Option<String>, reason: String },
}

/// Discharges ordinal termination obligations. The functions named in
/// `opaque` are present in `world` but must not be expanded.
pub trait VcProver {
    fn discharge(&mut self, world: &World, opaque: &[String], vc: &TerminationVC) -> Result<bool, String>;
}

/// A prover that refuses every obligation; only structural recursion admits.
pub struct NoProver;

impl VcProver for NoProver {
    fn discharge(&mut self, _: &World, _: &[String], _: &TerminationVC) -> Result<bool, String> {
        Ok(false)
    }
}

// ----------------------------------------------------------- rec calls

/// Calls to any of `members` in `body`, innermost first, each with its guard.
pub fn collect_rec_calls(caller: &str, body: &Term, members: &[String], world: &World) -> Vec<RecCall> {
    let mut out = Vec::new();
    let mut fresh = 0usize;
    walk(caller, body, members, world, &mut Vec::new(), &mut out, &mut fresh);
    out
}

fn walk(caller: &str, t: &Term, members: &[String], world: &World, guard: &mut Vec<Term>, out: &mut Vec<RecCall>, fresh: &mut usize) {
    match &t.kind {
        TermKind::If(c, a, b) => {
            walk(caller, c, members, world, guard, out, fresh);
            guard.push((**c).clone());
            walk(caller, a, members, world, guard, out, fresh);
            guard.pop();
            guard.push(Term::not((**c).clone()));
            walk(caller, b, members, world, guard, out, fresh);
            guard.pop();
        }
        TermKind::Bin(op @ (BinOp::And | BinOp::Or), a, b) => {
            walk(caller, a, members, world, guard, out, fresh);
            guard.push(if *op == BinOp::And { (**a).clone() } else { Term::not((**a).clone()) });
            walk(caller, b, members, world, guard, out, fresh);
            guard.pop();
        }
        TermKind::Let(x, a, b) => {
            walk(caller, a, members, world, guard, out, fresh);
            guard.push(Term::eq(Term::var(x.clone(), a.ty.clone()), (**a).clone()));
            walk(caller, b, members, world, guard, out, fresh);
            guard.pop();
        }
        TermKind::Match(s, bs) => {
            walk(caller, s, members, world, guard, out, fresh);
            let ctor_args = |c: &str, ty: &Type| world.ctor_args_at(c, ty);
            let mark = guard.len();
            for (i, (p, body)) in bs.iter().enumerate() {
                // earlier branches that could have matched did not
                for (q, _) in &bs[..i] {
                    if !term::patterns_disjoint(p, q) {
                        let mut conds = Vec::new();
                        let mut binds = BTreeMap::new();
                        term::pattern_condition(q, s, &mut conds, &mut binds, &ctor_args);
                        guard.push(Term::not(Term::and_all(conds)));
                    }
                }
                guard.extend(match_equations(s, p, world, fresh));
                walk(caller, body, members, world, guard, out, fresh);
                guard.truncate(mark);
            }
        }
        _ => {
            t.for_each_child(|c| walk(caller, c, members, world, guard, out, fresh));
            if let Some((f, args)) = t.as_call() {
                if members.iter().any(|m| m == f) {
                    out.push(RecCall { caller: caller.to_string(), callee: f.to_string(), args: args.to_vec(), guard: guard.clone() });
                }
            }
        }
    }
}

/// `scrutinee = pattern-as-term`, split componentwise over tuples.
fn match_equations(s: &Term, p: &Pat, world: &World, fresh: &mut usize) -> Vec<Term> {
    match (p, &s.kind) {
        (Pat::Wild, _) => Vec::new(),
        (Pat::Tuple(ps), TermKind::Tuple(xs)) => {
            ps.iter().zip(xs).flat_map(|(p, x)| match_equations(x, p, world, fresh)).collect()
        }
        _ => vec![Term::eq(s.clone(), pattern_term(p, &s.ty, world, fresh))],
    }
}

/// The pattern read as a term; wildcards become fresh variables.
pub fn pattern_term(p: &Pat, ty: &Type, world: &World, fresh: &mut usize) -> Term {
    match p {
        Pat::Var(x) => Term::var(x.clone(), ty.clone()),
        Pat::Wild => {
            *fresh += 1;
            Term::var(format!("_w{}", fresh), ty.clone())
        }
        Pat::Int(n) => Term::int(n.clone()),
        Pat::Bool(b) => Term::bool(*b),
        Pat::Tuple(ps) => {
            let tys = match ty {
                Type::Tuple(ts) => ts.clone(),
                _ => vec![Type::Int; ps.len()],
            };
            let xs: Vec<Term> = ps.iter().zip(&tys).map(|(p, t)| pattern_term(p, t, world, fresh)).collect();
            Term::new(TermKind::Tuple(xs), ty.clone())
        }
        Pat::Ctor(c, ps) => {
            let tys = world.ctor_args_at(c, ty);
            let xs: Vec<Term> = ps.iter().zip(&tys).map(|(p, t)| pattern_term(p, t, world, fresh)).collect();
            Term::new(TermKind::Ctor(c.clone(), xs), ty.clone())
        }
    }
}

// -------------------------------------------------------------- measures

fn ordinal_ty() -> Type {
    Type::adt(types::ORDINAL)
}

fn of_int(t: Term) -> Term {
    Term::call("Ordinal.of_int", vec![t], ordinal_ty())
}

fn pair(a: Term, b: Term) -> Term {
    Term::call("Ordinal.pair", vec![a, b], ordinal_ty())
}

/// Elaborates the measure annotation of `f`, or infers a structural measure
/// for a single recursive function.
pub fn elaborate_measure(f: &TypedFun, calls: &[RecCall], world: &World) -> Result<MeasureSpec, AdmissionError> {
    for a in &f.decl.annotations {
        match a {
            Annotation::Adm(names) => {
                let mut terms = Vec::new();
                for n in names {
                    let ty = f.params.iter().find(|(p, _)| p == n).map(|(_, t)| t.clone()).unwrap_or(Type::Int);
                    if ty != Type::Int {
                        return Err(AdmissionError::BadMeasure {
                            name: f.name.clone(),
                            reason: format!("`[@@adm]` parameter `{}` has type {}, expected int", n, ty),
                        });
                    }
                    terms.push(of_int(Term::var(n.clone(), Type::Int)));
                }
                // left-nested pairing keeps the order lexicographic for any arity
                let mut it = terms.into_iter();
                let first = it.next().expect("adm with no names");
                let term = it.fold(first, pair);
                return Ok(MeasureSpec::Explicit { term, from_adm: Some(names.clone()) });
            }
            Annotation::Measure(e) => {
                let term = typecheck::infer_closed(e, world, &f.params)
                    .map_err(|err| AdmissionError::BadMeasure { name: f.name.clone(), reason: format!("{}", err) })?;
                if term.ty != ordinal_ty() {
                    return Err(AdmissionError::BadMeasure {
                        name: f.name.clone(),
                        reason: format!("measure has type {}, expected {}", term.ty, types::ORDINAL),
                    });
                }
                return Ok(MeasureSpec::Explicit { term, from_adm: None });
            }
            _ => {}
        }
    }
    let own: Vec<&RecCall> = calls.iter().filter(|c| c.callee == f.name).collect();
    for (i, (p, ty)) in f.params.iter().enumerate() {
        if !matches!(ty, Type::Adt(..)) {
            continue;
        }
        if own.iter().all(|c| c.args.get(i).is_some_and(|a| strict_subterm(a, p, &c.guard))) {
            return Ok(MeasureSpec::Structural(i));
        }
    }
    Err(AdmissionError::NoMeasure {
        name: f.name.clone(),
        reason: String::from("no parameter decreases structurally at every recursive call and no [@@adm] or [@@measure] is given"),
    })
}

/// Is `t` a strict subterm of variable `p`, given the path equations?
pub fn strict_subterm(t: &Term, p: &str, guard: &[Term]) -> bool {
    let below = vars_below(p, guard);
    is_below(t, p, &below)
}

fn is_below(t: &Term, p: &str, below: &BTreeSet<String>) -> bool {
    match &t.kind {
        TermKind::Var(x) => below.contains(x),
        TermKind::Select(_, _, inner) => matches!(&inner.kind, TermKind::Var(x) if x == p) || is_below(inner, p, below),
        _ => false,
    }
}

/// Variables known to be strict subterms of `p`.
fn vars_below(p: &str, guard: &[Term]) -> BTreeSet<String> {
    let mut below: BTreeSet<String> = BTreeSet::new();
    let mut same: BTreeSet<String> = BTreeSet::new();
    same.insert(p.to_string());
    loop {
        let before = (below.len(), same.len());
        for g in guard {
            if let TermKind::Bin(BinOp::Eq, l, r) = &g.kind {
                for (a, b) in [(l, r), (r, l)] {
                    if let TermKind::Var(x) = &a.kind {
                        match &b.kind {
                            TermKind::Ctor(_, args) if same.contains(x) || below.contains(x) => {
                                for arg in args {
                                    collect_vars(arg, &mut below);
                                }
                            }
                            TermKind::Var(y) if same.contains(y) => {
                                same.insert(x.clone());
                            }
                            TermKind::Var(y) if below.contains(y) => {
                                below.insert(x.clone());
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        if (below.len(), same.len()) == before {
            return below;
        }
    }
}

fn collect_vars(t: &Term, out: &mut BTreeSet<String>) {
    match &t.kind {
        TermKind::Var(x) => {
            out.insert(x.clone());
        }
        TermKind::Ctor(_, xs) | TermKind::Tuple(xs) => xs.iter().for_each(|x| collect_vars(x, out)),
        _ => {}
    }
}

/// One obligation per recursive call. `measures` holds the measure of each
/// clique member, `params` their formal parameters.
pub fn gen_termination_vcs(
    calls: &[RecCall],
    measures: &BTreeMap<String, MeasureSpec>,
    params: &BTreeMap<String, Vec<(String, Type)>>,
) -> Vec<TerminationVC> {
    let mut out = Vec::new();
    for call in calls {
        let caller_m = &measures[&call.caller];
        let callee_m = &measures[&call.callee];
        let caller_ps = &params[&call.caller];
        let callee_ps = &params[&call.callee];
        let vc = match (caller_m, callee_m) {
            (MeasureSpec::Structural(i), MeasureSpec::Structural(j)) => TerminationVC {
                kind: VcKind::Structural,
                call: call.clone(),
                hyps: call.guard.clone(),
                lhs: call.args[*j].clone(),
                rhs: Term::var(caller_ps[*i].0.clone(), caller_ps[*i].1.clone()),
            },
            _ => {
                let s: BTreeMap<String, Term> =
                    callee_ps.iter().map(|(x, _)| x.clone()).zip(call.args.iter().cloned()).collect();
                TerminationVC {
                    kind: VcKind::Ordinal,
                    call: call.clone(),
                    hyps: call.guard.clone(),
                    lhs: measure_term(callee_m, callee_ps).subst(&s),
                    rhs: measure_term(caller_m, caller_ps),
                }
            }
        };
        out.push(vc);
    }
    out
}

fn measure_term(m: &MeasureSpec, ps: &[(String, Type)]) -> Term {
    match m {
        MeasureSpec::Explicit { term, .. } => term.clone(),
        // structural measures never meet explicit ones inside one clique
        MeasureSpec::Structural(i) => Term::var(ps[*i].0.clone(), ps[*i].1.clone()),
    }
}

// -------------------------------------------------------------- admission

/// What admission established for a function group.
#[derive(Debug, Clone)]
pub struct AdmitReport {
    pub names: Vec<String>,
    pub measures: Vec<(String, MeasureSpec)>,
    pub vcs: Vec<TerminationVC>,
}

pub fn admit_type(td: &TypeDecl, world: &World) -> Result<World, AdmissionError> {
    let (def, ctors) = typecheck::check_type_decl(td, world)?;
    let mut w = world.clone();
    w.insert_type(def, ctors);
    Ok(w)
}

pub fn admit_group(g: &FunGroup, world: &World, prover: &mut dyn VcProver) -> Result<(World, AdmitReport), AdmissionError> {
    let typed = typecheck::infer_group(g, world)?;
    admit_typed_group(&typed, world, prover)
}

pub fn admit_typed_group(typed: &TypedGroup, world: &World, prover: &mut dyn VcProver) -> Result<(World, AdmitReport), AdmissionError> {
    let names: Vec<String> = typed.funs.iter().map(|f| f.name.clone()).collect();
    let mut report = AdmitReport { names: names.clone(), measures: Vec::new(), vcs: Vec::new() };
    let mut calls: BTreeMap<String, Vec<RecCall>> = BTreeMap::new();
    for f in &typed.funs {
        let cs = if typed.is_rec { collect_rec_calls(&f.name, &f.body, &names, world) } else { Vec::new() };
        calls.insert(f.name.clone(), cs);
    }
    let is_rec = typed.is_rec && calls.values().any(|c| !c.is_empty());
    if !is_rec {
        let mut w = world.clone();
        for f in &typed.funs {
            w.insert_fun(entry(f, &names, false, None, Vec::new(), Certificate::NonRecursive));
        }
        return Ok((w, report));
    }
    let all_calls: Vec<RecCall> = calls.values().flatten().cloned().collect();
    let params: BTreeMap<String, Vec<(String, Type)>> = typed.funs.iter().map(|f| (f.name.clone(), f.params.clone())).collect();
    let (measures, vcs, proved) = match elaborate_group_measures(typed, &calls, world) {
        Ok(measures) => {
            let (vcs, proved) = discharge(typed, &measures, &calls, &all_calls, &params, world, prover)?;
            (measures, vcs, proved)
        }
        Err(AdmissionError::NoMeasure { name, reason }) => {
            // fall back to the integer parameters, one at a time
            let mut last = AdmissionError::TerminationUnproved { name, vc: None, reason };
            let mut found = None;
            if let [f] = typed.funs.as_slice() {
                for (p, ty) in &f.params {
                    if *ty != Type::Int {
                        continue;
                    }
                    let m = MeasureSpec::Explicit { term: of_int(Term::var(p.clone(), Type::Int)), from_adm: None };
                    let measures: BTreeMap<String, MeasureSpec> = [(f.name.clone(), m)].into_iter().collect();
                    match discharge(typed, &measures, &calls, &all_calls, &params, world, prover) {
                        Ok((vcs, proved)) => {
                            found = Some((measures, vcs, proved));
                            break;
                        }
                        Err(e) => last = e,
                    }
                }
            }
            found.ok_or(last)?
        }
        Err(e) => return Err(e),
    };
    let cert = if vcs.iter().all(|v| v.kind == VcKind::Structural) {
        Certificate::Structural(
            typed
                .funs
                .iter()
                .map(|f| match measures[&f.name] {
                    MeasureSpec::Structural(i) => i,
                    _ => 0,
                })
                .collect(),
        )
    } else {
        Certificate::Proved(proved)
    };
    let mut w = world.clone();
    for f in &typed.funs {
        let m = measures[&f.name].clone();
        report.measures.push((f.name.clone(), m.clone()));
        w.insert_fun(entry(f, &names, true, Some(m), calls[&f.name].clone(), cert.clone()));
    }
    report.vcs = vcs;
    Ok((w, report))
}

fn discharge(
    typed: &TypedGroup,
    measures: &BTreeMap<String, MeasureSpec>,
    calls: &BTreeMap<String, Vec<RecCall>>,
    all_calls: &[RecCall],
    params: &BTreeMap<String, Vec<(String, Type)>>,
    world: &World,
    prover: &mut dyn VcProver,
) -> Result<(Vec<TerminationVC>, usize), AdmissionError> {
    let names: Vec<String> = typed.funs.iter().map(|f| f.name.clone()).collect();
    let vcs = gen_termination_vcs(all_calls, measures, params);
    // provisional world where the clique is declared but opaque
    let mut provisional = world.clone();
    for f in &typed.funs {
        let m = measures.get(&f.name).cloned();
        provisional.insert_fun(entry(f, &names, true, m, calls[&f.name].clone(), Certificate::Proved(0)));
    }
    let mut proved = 0usize;
    for vc in &vcs {
        match vc.kind {
            VcKind::Structural => {
                let p = match &vc.rhs.kind {
                    TermKind::Var(p) => p.clone(),
                    _ => String::new(),
                };
                if !strict_subterm(&vc.lhs, &p, &vc.hyps) {
                    return Err(unproved(&vc.call.caller, vc, "argument is not a strict subterm"));
                }
            }
            VcKind::Ordinal => match prover.discharge(&provisional, &names, vc) {
                Ok(true) => proved += 1,
                Ok(false) => return Err(unproved(&vc.call.caller, vc, "the obligation could not be proved")),
                Err(e) => return Err(unproved(&vc.call.caller, vc, &e)),
            },
        }
    }
    Ok((vcs, proved))
}

fn unproved(name: &str, vc: &TerminationVC, reason: &str) -> AdmissionError {
    AdmissionError::TerminationUnproved { name: name.to_string(), vc: Some(format!("{}", vc)), reason: reason.to_string() }
}

fn elaborate_group_measures(
    typed: &TypedGroup,
    calls: &BTreeMap<String, Vec<RecCall>>,
    world: &World,
) -> Result<BTreeMap<String, MeasureSpec>, AdmissionError> {
    let mut out = BTreeMap::new();
    if typed.funs.len() == 1 {
        let f = &typed.funs[0];
        out.insert(f.name.clone(), elaborate_measure(f, &calls[&f.name], world)?);
        return Ok(out);
    }
    let annotated = typed.funs.iter().any(|f| f.decl.annotations.iter().any(|a| matches!(a, Annotation::Adm(_) | Annotation::Measure(_))));
    if annotated {
        for f in &typed.funs {
            let m = elaborate_measure(f, &[], world)?;
            if let MeasureSpec::Structural(_) = m {
                return Err(AdmissionError::NoMeasure {
                    name: f.name.clone(),
                    reason: String::from("every member of an annotated mutual group needs its own measure"),
                });
            }
            out.insert(f.name.clone(), m);
        }
        return Ok(out);
    }
    // Mutual pair: search index pairs where every call strictly shrinks.
    let (f, g) = (&typed.funs[0], &typed.funs[1]);
    for i in 0..f.params.len() {
        for j in 0..g.params.len() {
            let idx = |n: &str| if n == f.name { i } else { j };
            let pname = |n: &str| if n == f.name { &f.params[i] } else { &g.params[j] };
            if !matches!(f.params[i].1, Type::Adt(..)) || !matches!(g.params[j].1, Type::Adt(..)) {
                continue;
            }
            let ok = calls.values().flatten().all(|c| {
                c.args.get(idx(&c.callee)).is_some_and(|a| strict_subterm(a, &pname(&c.caller).0, &c.guard))
            });
            if ok {
                out.insert(f.name.clone(), MeasureSpec::Structural(i));
                out.insert(g.name.clone(), MeasureSpec::Structural(j));
                return Ok(out);
            }
        }
    }
    Err(AdmissionError::NoMeasure {
        name: f.name.clone(),
        reason: format!("no pair of parameters of `{}` and `{}` decreases structurally at every call", f.name, g.name),
    })
}

fn entry(f: &TypedFun, group: &[String], is_rec: bool, measure: Option<MeasureSpec>, rec_calls: Vec<RecCall>, certificate: Certificate) -> FunEntry {
    FunEntry {
        name: f.name.clone(),
        params: f.params.clone(),
        ret: f.ret.clone(),
        scheme: f.scheme.clone(),
        body: f.body.clone(),
        group: group.to_vec(),
        is_rec,
        measure,
        rec_calls,
        certificate,
        decl: Some(f.decl.clone()),
    }
}

/// Records a theorem; rewrite rules are installed only once proved.
pub fn admit_theorem(t: &TypedTheorem, world: &World, proved: bool) -> World {
    let rewrite = t.decl.annotations.contains(&Annotation::Rewrite);
    let auto = t.decl.annotations.contains(&Annotation::Auto);
    let mut w = world.clone();
    w.insert_theorem(TheoremEntry {
        name: t.name.clone(),
        params: t.params.clone(),
        body: t.body.clone(),
        rewrite,
        auto,
        proved,
        decl: Some(t.decl.clone()),
    });
    w
}

/// `Lambda` wrapper used when a function value is needed.
pub fn as_lambda(f: &FunEntry) -> Term {
    if f.params.is_empty() {
        return f.body.clone();
    }
    let ty = Type::arrows(f.param_types(), f.ret.clone());
    Term::new(TermKind::Lambda(f.params.clone(), Box::new(f.body.clone())), ty)
}

#[cfg(test)]
mod tests;
