//! Generalization of repeated subterms, filtered by a counterexample search.

use std::collections::{BTreeMap, BTreeSet};

use imandra_core::term::{self, Term, TermKind};

use super::rewrite::contains;
use super::GoalState;

/// Maximal first-order call subterms occurring at least twice in the goal,
/// largest first.
pub fn repeated_subterms(g: &GoalState) -> Vec<Term> {
    let mut counts: BTreeMap<Term, usize> = BTreeMap::new();
    for t in g.hyps.iter().chain([&g.concl]) {
        count_calls(t, &mut counts);
    }
    let mut reps: Vec<Term> = counts.into_iter().filter(|(t, n)| *n >= 2 && !t.ty.contains_arrow()).map(|(t, _)| t).collect();
    reps.sort_by(|a, b| b.size().cmp(&a.size()).then_with(|| a.cmp(b)));
    let mut out: Vec<Term> = Vec::new();
    for t in reps {
        if !out.iter().any(|o| contains(o, &t)) {
            out.push(t);
        }
    }
    out
}

fn count_calls(t: &Term, counts: &mut BTreeMap<Term, usize>) {
    if matches!(t.kind, TermKind::Lambda(..)) {
        return;
    }
    if t.as_call().is_some() && !t.is_value() {
        *counts.entry(t.clone()).or_default() += 1;
    }
    t.for_each_child(|c| count_calls(c, counts));
}

pub fn replace(t: &Term, from: &Term, to: &Term) -> Term {
    if t == from {
        return to.clone();
    }
    t.map_children(|c| replace(c, from, to))
}

/// The goal with every maximal repeated subterm replaced by a fresh variable.
/// Returns `None` when nothing repeats.
pub fn generalize_candidate(g: &GoalState) -> Option<GoalState> {
    let reps = repeated_subterms(g);
    if reps.is_empty() {
        return None;
    }
    let mut avoid: BTreeSet<String> = g.formula().free_vars();
    let mut out = g.clone();
    let mut names = Vec::new();
    for t in &reps {
        let n = term::fresh_name("g", &avoid);
        avoid.insert(n.clone());
        let v = Term::var(n.clone(), t.ty.clone());
        out.hyps = out.hyps.iter().map(|h| replace(h, t, &v)).collect();
        out.concl = replace(&out.concl, t, &v);
        names.push(format!("{} := {}", n, t));
    }
    out.history.push(format!("generalize {}", names.join(", ")));
    Some(out)
}

/// Generalizes the goal unless `refutes` finds a counterexample to the
/// candidate; otherwise returns the goal unchanged.
pub fn generalize_with(g: &GoalState, refutes: &mut dyn FnMut(&GoalState) -> bool) -> GoalState {
    match generalize_candidate(g) {
        Some(c) if !refutes(&c) => c,
        _ => g.clone(),
    }
}
