//! Unsat-core guided unrolling of recursive function calls.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use imandra_core::eval::Value;
use imandra_core::lower::GroundProgram;
use imandra_core::template::{self, Template};
use imandra_core::term::{self, Term};
use imandra_core::types::Type;

use crate::smt::{CheckResult, EncodeError, Encoder, Session, SolverError, Sexp};

pub const DEFAULT_BUDGET: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnrollError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

/// The reachability literal of one call term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachLit {
    pub call: Term,
    /// The call as a solver term; literals are unique per key.
    pub key: Sexp,
    pub atom: String,
    /// Loop iteration at which the literal entered the queue.
    pub enqueued: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnrollOutcome {
    /// Ground values of the goal variables.
    Sat(Vec<(String, Value)>),
    UnsatEmptyCore,
    BudgetExhausted { last_core: Vec<Term>, reason: Option<String> },
}

/// One loop iteration, for `--trace-unroll`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub verdict: String,
    pub core: usize,
    pub picked: Option<String>,
    pub queue: usize,
    pub expanded: usize,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[unroll] step={} verdict={} core={} queue={} expanded={}", self.step, self.verdict, self.core, self.queue, self.expanded)?;
        if let Some(p) = &self.picked {
            write!(f, " picked={}", p)?;
        }
        Ok(())
    }
}

/// Chooses the literal to expand among the core members (indices into the
/// literal table).
pub type Picker = fn(&Unroller<'_>, &[usize]) -> usize;

/// Fair choice: the earliest enqueued member, ties broken by the printed call.
pub fn pick_from(u: &Unroller<'_>, core: &[usize]) -> usize {
    *core
        .iter()
        .min_by(|&&a, &&b| {
            let (la, lb) = (&u.lits[a], &u.lits[b]);
            la.enqueued.cmp(&lb.enqueued).then_with(|| la.call.to_string().cmp(&lb.call.to_string()))
        })
        .expect("nonempty core")
}

pub struct Unroller<'p> {
    pub enc: Encoder<'p>,
    session: Session,
    vars: Vec<(String, Type)>,
    goal: Term,
    /// Functions left uninterpreted: their calls get no literal.
    opaque: BTreeSet<String>,
    pub lits: Vec<ReachLit>,
    index: BTreeMap<Sexp, usize>,
    queue: BTreeSet<usize>,
    expanded: Vec<usize>,
    templates: BTreeMap<String, (Template, Vec<(String, Type)>, Term)>,
    step: usize,
    pub picker: Picker,
    pub trace: Vec<TraceStep>,
    /// Every formula asserted, in order.
    pub formulas: Vec<Sexp>,
}

impl<'p> Unroller<'p> {
    /// Declares the program and the goal variables in `session`.
    pub fn new(
        prog: &'p GroundProgram,
        vars: &[(String, Type)],
        goal: &Term,
        mut session: Session,
        opaque: BTreeSet<String>,
    ) -> Result<Self, UnrollError> {
        let tys: Vec<Type> = vars.iter().map(|(_, t)| t.clone()).collect();
        let mut enc = Encoder::new(prog, &tys);
        enc.note_term(goal);
        for d in enc.declarations() {
            session.command(&d)?;
        }
        for (x, t) in vars {
            session.command(&enc.declare_const(x, t))?;
        }
        Ok(Unroller {
            enc,
            session,
            vars: vars.to_vec(),
            goal: goal.clone(),
            opaque,
            lits: Vec::new(),
            index: BTreeMap::new(),
            queue: BTreeSet::new(),
            expanded: Vec::new(),
            templates: BTreeMap::new(),
            step: 0,
            picker: pick_from,
            trace: Vec::new(),
            formulas: Vec::new(),
        })
    }

    pub fn queue(&self) -> impl Iterator<Item = &ReachLit> {
        self.queue.iter().map(|&i| &self.lits[i])
    }

    pub fn expanded(&self) -> impl Iterator<Item = &ReachLit> {
        self.expanded.iter().map(|&i| &self.lits[i])
    }

    pub fn session(&mut self) -> &mut Session {
        &mut self.session
    }

    fn expandable(&self, t: &Term) -> bool {
        t.as_call().is_some_and(|(f, _)| self.enc.prog.fun(f).is_some() && !self.opaque.contains(f))
    }

    /// The literal of `call`, created if needed.
    fn lit_for(&mut self, call: &Term) -> Result<usize, UnrollError> {
        let call = term::fold_constants(call);
        let key = self.enc.term(&call)?;
        if let Some(&i) = self.index.get(&key) {
            return Ok(i);
        }
        let i = self.lits.len();
        self.lits.push(ReachLit { call, key: key.clone(), atom: format!("b!{}", i), enqueued: self.step });
        self.index.insert(key, i);
        self.session.command(&Sexp::list([Sexp::atom("declare-const"), Sexp::atom(format!("b!{}", i)), Sexp::atom("Bool")]))?;
        Ok(i)
    }

    /// Literals of the expandable calls in `t`.
    pub fn calls_of_term(&mut self, t: &Term) -> Result<Vec<usize>, UnrollError> {
        let t = template::normalized_body(t, self.enc.prog);
        let mut calls = Vec::new();
        term::calls_in(&t, &mut calls);
        let mut out = Vec::new();
        calls.retain(|c| self.expandable(c));
        for c in &calls {
            let i = self.lit_for(c)?;
            if !out.contains(&i) {
                out.push(i);
            }
        }
        Ok(out)
    }

    fn template(&mut self, f: &str) -> &(Template, Vec<(String, Type)>, Term) {
        let prog = self.enc.prog;
        self.templates.entry(f.to_string()).or_insert_with(|| {
            let g = prog.fun(f).expect("known function");
            let tpl = template::template_for(prog, f).expect("known function");
            (tpl, g.params.clone(), template::normalized_body(&g.body, prog))
        })
    }

    /// Template entries of `call` at its actuals as (literal, path) pairs,
    /// without entries whose call is already expanded.
    pub fn subcalls_of_call(&mut self, call: &Term) -> Result<Vec<(usize, Term)>, UnrollError> {
        let (f, actuals) = call.as_call().map(|(f, a)| (f.to_string(), a.to_vec())).expect("a call");
        let (tpl, _, _) = self.template(&f).clone();
        let mut out = Vec::new();
        for (sub, path) in template::instantiate(&tpl, &actuals) {
            if !self.expandable(&sub) {
                continue;
            }
            let p = term::fold_constants(&Term::and_all(path));
            if p.is_false() {
                continue;
            }
            let i = self.lit_for(&sub)?;
            if self.expanded.contains(&i) {
                continue;
            }
            out.push((i, p));
        }
        Ok(out)
    }

    fn assert(&mut self, f: Sexp) -> Result<(), UnrollError> {
        self.formulas.push(f.clone());
        self.session.assert(f)?;
        Ok(())
    }

    fn expand(&mut self, i: usize) -> Result<(), UnrollError> {
        self.queue.remove(&i);
        self.expanded.push(i);
        let call = self.lits[i].call.clone();
        let (f, actuals) = call.as_call().map(|(f, a)| (f.to_string(), a.to_vec())).expect("a call");
        let (_, params, body) = self.template(&f).clone();
        let s: BTreeMap<String, Term> = params.iter().map(|(x, _)| x.clone()).zip(actuals).collect();
        let inst = term::fold_constants(&body.subst(&s));
        let b = Sexp::atom(self.lits[i].atom.clone());
        self.assert(b.clone())?;
        let eq = Sexp::list([Sexp::atom("="), self.lits[i].key.clone(), self.enc.term(&inst)?]);
        self.assert(eq)?;
        for (j, p) in self.subcalls_of_call(&call)? {
            let guard = if p.is_true() { b.clone() } else { Sexp::list([Sexp::atom("and"), b.clone(), self.enc.term(&p)?]) };
            self.assert(Sexp::list([Sexp::atom("=>"), guard, Sexp::atom(self.lits[j].atom.clone())]))?;
            if !self.expanded.contains(&j) {
                self.queue.insert(j);
            }
        }
        Ok(())
    }

    fn core_lits(&self, core: &[Sexp]) -> Vec<usize> {
        let mut out: Vec<usize> = core
            .iter()
            .filter_map(|s| match s.as_list() {
                Some([n, a]) if n.is_atom("not") => a.as_atom(),
                _ => s.as_atom(),
            })
            .filter_map(|a| a.strip_prefix("b!").and_then(|n| n.parse().ok()))
            .filter(|i| self.queue.contains(i))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn model(&mut self) -> Result<Vec<(String, Value)>, UnrollError> {
        let names: Vec<Sexp> = self.vars.iter().map(|(x, _)| Sexp::atom(crate::smt::encode::var_symbol(x))).collect();
        let vals = self.session.get_values(&names)?;
        let mut out = Vec::new();
        for ((x, t), v) in self.vars.iter().zip(&vals) {
            out.push((x.clone(), self.enc.value(v, t)?));
        }
        Ok(out)
    }

    /// Runs the loop on the goal until a model, an empty core, or `budget`
    /// expansions.
    pub fn run(&mut self, budget: usize) -> Result<UnrollOutcome, UnrollError> {
        let goal = self.goal.clone();
        let g = self.enc.term(&goal)?;
        self.assert(g)?;
        for i in self.calls_of_term(&goal)? {
            if !self.expanded.contains(&i) {
                self.queue.insert(i);
                self.assert(Sexp::atom(self.lits[i].atom.clone()))?;
            }
        }
        loop {
            let assumptions: Vec<Sexp> = self.queue.iter().map(|&i| Sexp::list([Sexp::atom("not"), Sexp::atom(self.lits[i].atom.clone())])).collect();
            let r = self.session.check_sat_assuming(&assumptions)?;
            let mut step = TraceStep { step: self.step, verdict: String::new(), core: 0, picked: None, queue: self.queue.len(), expanded: self.expanded.len() };
            match r {
                CheckResult::Sat => {
                    step.verdict = "sat".into();
                    self.trace.push(step);
                    return Ok(UnrollOutcome::Sat(self.model()?));
                }
                CheckResult::Unknown(why) => {
                    step.verdict = "unknown".into();
                    self.trace.push(step);
                    return Ok(UnrollOutcome::BudgetExhausted { last_core: Vec::new(), reason: Some(why) });
                }
                CheckResult::Unsat(core) => {
                    let core = self.core_lits(&core);
                    step.verdict = "unsat".into();
                    step.core = core.len();
                    if core.is_empty() {
                        self.trace.push(step);
                        return Ok(UnrollOutcome::UnsatEmptyCore);
                    }
                    if self.expanded.len() >= budget {
                        self.trace.push(step);
                        let last_core = core.iter().map(|&i| self.lits[i].call.clone()).collect();
                        return Ok(UnrollOutcome::BudgetExhausted { last_core, reason: None });
                    }
                    let pick = (self.picker)(self, &core);
                    self.step += 1;
                    self.expand(pick)?;
                    step.picked = Some(self.lits[pick].call.to_string());
                    step.queue = self.queue.len();
                    step.expanded = self.expanded.len();
                    self.trace.push(step);
                }
            }
        }
    }
}

/// Ground-program names of the source functions in `names`.
pub fn ground_names(prog: &GroundProgram, names: &[String]) -> BTreeSet<String> {
    prog.funs.iter().filter(|f| !f.lifted && names.contains(&f.source)).map(|f| f.name.clone()).collect()
}
