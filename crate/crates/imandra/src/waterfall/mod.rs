//! Inductive waterfall: simplify, decide by unrolling, generalize, induct.

pub mod generalize;
pub mod induction;
pub mod rewrite;

use std::fmt;

use imandra_core::eval::Counterexample;
use imandra_core::term::Term;
use imandra_core::typecheck::TypedGoal;
use imandra_core::world::World;

use crate::engine::{self, EngineConfig, Verdict};

pub use generalize::{generalize_candidate, generalize_with, repeated_subterms};
pub use induction::{source_template, synthesize_induction, InductionCase, InductionScheme, SchemeKind};
pub use rewrite::{Rule, Simplifier, REWRITE_CAP};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalState {
    pub hyps: Vec<Term>,
    pub concl: Term,
    /// Number of inductions above this goal.
    pub depth: usize,
    pub history: Vec<String>,
}

impl GoalState {
    pub fn from_formula(t: &Term) -> GoalState {
        let (hyps, concl) = rewrite::split_implication(t);
        GoalState { hyps, concl, depth: 0, history: Vec::new() }
    }

    pub fn formula(&self) -> Term {
        if self.hyps.is_empty() {
            self.concl.clone()
        } else {
            Term::implies(Term::and_all(self.hyps.clone()), self.concl.clone())
        }
    }

    pub fn typed_goal(&self) -> TypedGoal {
        let body = self.formula();
        TypedGoal { vars: body.free_vars_typed(), body }
    }

    pub fn is_proved(&self) -> bool {
        self.concl.is_true()
    }
}

impl fmt::Display for GoalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hs: Vec<String> = self.hyps.iter().map(|h| h.to_string()).collect();
        if hs.is_empty() {
            write!(f, "|- {}", self.concl)
        } else {
            write!(f, "{} |- {}", hs.join("; "), self.concl)
        }
    }
}

const SIMPLIFY_ROUNDS: usize = 8;

/// Rewrites hypotheses left to right, each under the ones before it, then
/// the conclusion under all of them, until nothing changes.
pub fn simplify_with(s: &mut Simplifier<'_>, g: &GoalState) -> GoalState {
    let mut cur = g.clone();
    for _ in 0..SIMPLIFY_ROUNDS {
        let mut hyps: Vec<Term> = Vec::new();
        let mut vacuous = false;
        for h in &cur.hyps {
            let h = s.rewrite(h, &hyps);
            if h.is_false() {
                vacuous = true;
                break;
            }
            rewrite::push_conjuncts(&h, &mut hyps);
        }
        let concl = if vacuous { Term::bool(true) } else { s.rewrite(&cur.concl, &hyps) };
        let (more, concl) = rewrite::split_implication(&concl);
        for h in more {
            rewrite::push_conjuncts(&h, &mut hyps);
        }
        if concl.is_true() {
            hyps.clear();
        }
        let next = GoalState { hyps, concl, depth: cur.depth, history: cur.history.clone() };
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

pub fn simplify(g: &GoalState, w: &World) -> GoalState {
    simplify_with(&mut Simplifier::new(w), g)
}

#[derive(Debug, Clone)]
pub struct WaterfallConfig {
    pub engine: EngineConfig,
    pub max_depth: usize,
    /// Expansion budget of the generalization filter.
    pub cx_budget: usize,
    /// Cap on the number of goals visited.
    pub max_goals: usize,
}

impl Default for WaterfallConfig {
    fn default() -> Self {
        WaterfallConfig { engine: EngineConfig::default(), max_depth: 3, cx_budget: 20, max_goals: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GiveUp {
    MaxDepth,
    NoScheme,
    Budget,
    /// A subgoal below an induction or generalization has a counterexample.
    SubgoalRefuted,
}

impl fmt::Display for GiveUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GiveUp::MaxDepth => "maximum induction depth reached",
            GiveUp::NoScheme => "no induction scheme",
            GiveUp::Budget => "goal budget exhausted",
            GiveUp::SubgoalRefuted => "a subgoal was refuted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Proved,
    Refuted(Counterexample),
    GaveUp(GiveUp),
}

#[derive(Debug, Clone)]
pub struct Proof {
    pub outcome: Outcome,
    /// One line per move.
    pub trace: Vec<String>,
    pub goals: usize,
    pub inductions: usize,
}

struct Prover<'a> {
    w: &'a World,
    cfg: &'a WaterfallConfig,
    trace: Vec<String>,
    goals: usize,
    inductions: usize,
}

impl Prover<'_> {
    fn log(&mut self, depth: usize, mv: &str, detail: impl fmt::Display) {
        self.trace.push(format!("[waterfall] depth={} {}: {}", depth, mv, detail));
    }

    fn decide(&mut self, g: &GoalState, budget: usize) -> Option<Verdict> {
        let mut cfg = self.cfg.engine.clone();
        cfg.budget = budget;
        match engine::verify(self.w, &g.typed_goal(), &cfg) {
            Ok(run) => Some(run.verdict),
            Err(e) => {
                self.log(g.depth, "decide", format!("error: {}", e));
                None
            }
        }
    }

    fn go(&mut self, g: &GoalState) -> Outcome {
        self.goals += 1;
        if self.goals > self.cfg.max_goals {
            return Outcome::GaveUp(GiveUp::Budget);
        }
        let d = g.depth;
        let mut s = Simplifier::new(self.w);
        let mut g1 = simplify_with(&mut s, g);
        if g1 != *g {
            g1.history.push("simplify".into());
            let rules: Vec<String> = s.hits.keys().cloned().collect();
            let used = if rules.is_empty() { String::new() } else { format!(" using {}", rules.join(", ")) };
            self.log(d, "simplify", format!("{}  ~>  {}{}", g, g1, used));
        }
        if g1.is_proved() {
            return Outcome::Proved;
        }
        match self.decide(&g1, self.cfg.engine.budget) {
            Some(Verdict::Proved) => {
                self.log(d, "decide", "proved by unrolling");
                return Outcome::Proved;
            }
            Some(Verdict::Refuted(cx)) => {
                self.log(d, "decide", format!("counterexample {}", cx));
                return if d == 0 && g1.history.iter().all(|h| !h.starts_with("generalize")) {
                    Outcome::Refuted(cx)
                } else {
                    Outcome::GaveUp(GiveUp::SubgoalRefuted)
                };
            }
            Some(v) => self.log(d, "decide", format!("{:?}", v)),
            None => {}
        }
        if d >= self.cfg.max_depth {
            return Outcome::GaveUp(GiveUp::MaxDepth);
        }
        let budget = self.cfg.cx_budget;
        let mut rejected = None;
        let g2 = generalize_with(&g1, &mut |c| {
            let refuted = matches!(self.decide(c, budget), Some(Verdict::Refuted(_)));
            if refuted {
                rejected = Some(c.to_string());
            }
            refuted
        });
        if let Some(c) = rejected {
            self.log(d, "generalize", format!("rejected {}", c));
        } else if g2 != g1 {
            self.log(d, "generalize", format!("{}  ~>  {}", g1, g2));
        }
        let Some(scheme) = synthesize_induction(&g2, self.w) else {
            self.log(d, "induct", "no scheme");
            return Outcome::GaveUp(GiveUp::NoScheme);
        };
        self.inductions += 1;
        self.log(d, "induct", &scheme);
        for (i, case) in scheme.cases.iter().enumerate() {
            let mut sub = case.goal(d + 1);
            sub.history = g2.history.clone();
            sub.history.push(format!("induct case {}", i + 1));
            match self.go(&sub) {
                Outcome::Proved => {}
                Outcome::Refuted(_) => return Outcome::GaveUp(GiveUp::SubgoalRefuted),
                o => return o,
            }
        }
        Outcome::Proved
    }
}

/// Runs the waterfall on a closed boolean goal.
pub fn prove(goal: &TypedGoal, w: &World, cfg: &WaterfallConfig) -> Proof {
    let mut p = Prover { w, cfg, trace: Vec::new(), goals: 0, inductions: 0 };
    let outcome = p.go(&GoalState::from_formula(&goal.body));
    Proof { outcome, trace: p.trace, goals: p.goals, inductions: p.inductions }
}

/// Generalizes `g` unless a bounded search refutes the candidate.
pub fn generalize(g: &GoalState, w: &World, cfg: &WaterfallConfig) -> GoalState {
    let mut ecfg = cfg.engine.clone();
    ecfg.budget = cfg.cx_budget;
    generalize_with(g, &mut |c| matches!(engine::verify(w, &c.typed_goal(), &ecfg), Ok(r) if matches!(r.verdict, Verdict::Refuted(_))))
}

#[cfg(test)]
mod tests;
