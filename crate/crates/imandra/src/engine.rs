//! `verify` and `instance` over a world: lowering, unrolling and
//! counterexample reflection.

use std::collections::BTreeSet;

use imandra_core::defn::{TerminationVC, VcProver};
use imandra_core::eval::{self, Counterexample, EvalError, Polarity, ReflectError, Value};
use imandra_core::lower::{lower_goal, LowerError};
use imandra_core::term::{self, Term};
use imandra_core::typecheck::TypedGoal;
use imandra_core::world::World;

use crate::smt::{Session, SolverConfig};
use crate::unroll::{self, Picker, TraceStep, UnrollError, UnrollOutcome, Unroller};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Proved,
    Refuted(Counterexample),
    Instance(Counterexample),
    NoInstanceExists,
    /// No answer within the given number of expansions.
    Unknown { bound: usize, reason: Option<String> },
}

impl Verdict {
    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Refuted(c) | Verdict::Instance(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Lower(#[from] LowerError),
    #[error(transparent)]
    Unroll(#[from] UnrollError),
    #[error("evaluating the witness failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Reflect(#[from] ReflectError),
    #[error("solver model {0} does not behave as claimed when evaluated")]
    Unconfirmed(String),
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub solver: SolverConfig,
    pub budget: usize,
    pub picker: Picker,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { solver: SolverConfig::from_env(), budget: unroll::DEFAULT_BUDGET, picker: unroll::pick_from }
    }
}

/// A finished `verify`/`instance` run.
#[derive(Debug, Clone)]
pub struct Run {
    pub verdict: Verdict,
    pub expansions: usize,
    pub trace: Vec<TraceStep>,
}

pub fn verify(w: &World, goal: &TypedGoal, cfg: &EngineConfig) -> Result<Run, EngineError> {
    run(w, goal, Polarity::Verify, cfg, &[])
}

pub fn instance(w: &World, goal: &TypedGoal, cfg: &EngineConfig) -> Result<Run, EngineError> {
    run(w, goal, Polarity::Instance, cfg, &[])
}

/// Runs the loop with the source functions in `opaque` left uninterpreted.
/// A model found under opaque functions is only reported when evaluation
/// confirms it; otherwise the answer is Unknown.
pub fn run(w: &World, goal: &TypedGoal, pol: Polarity, cfg: &EngineConfig, opaque: &[String]) -> Result<Run, EngineError> {
    let (gp, gg) = lower_goal(w, goal)?;
    let body = match pol {
        Polarity::Verify => Term::not(gg.body.clone()),
        Polarity::Instance => gg.body.clone(),
    };
    let session = Session::start(&cfg.solver).map_err(UnrollError::from)?;
    let mut u = Unroller::new(&gp, &gg.vars, &body, session, unroll::ground_names(&gp, opaque))?;
    u.picker = cfg.picker;
    let outcome = u.run(cfg.budget)?;
    let expansions = u.expanded().count();
    let trace = std::mem::take(&mut u.trace);
    let verdict = match outcome {
        UnrollOutcome::UnsatEmptyCore => match pol {
            Polarity::Verify => Verdict::Proved,
            Polarity::Instance => Verdict::NoInstanceExists,
        },
        UnrollOutcome::BudgetExhausted { reason, .. } => Verdict::Unknown { bound: cfg.budget, reason },
        UnrollOutcome::Sat(ground) => {
            let mut bindings = Vec::with_capacity(ground.len());
            for (x, v) in &ground {
                bindings.push((x.clone(), eval::to_source(v, &gp)?));
            }
            let mut cx = Counterexample { bindings, confirmed: false };
            let ok = eval::check_cx(w, &goal.body, &mut cx, pol).unwrap_or(false);
            match (ok, pol) {
                (true, Polarity::Verify) => Verdict::Refuted(cx),
                (true, Polarity::Instance) => Verdict::Instance(cx),
                (false, _) if !opaque.is_empty() => Verdict::Unknown { bound: cfg.budget, reason: Some("model depends on uninterpreted functions".into()) },
                (false, _) => return Err(EngineError::Unconfirmed(cx.to_string())),
            }
        }
    };
    Ok(Run { verdict, expansions, trace })
}

/// Discharges termination obligations by unrolling: first with every
/// non-ordinal function uninterpreted, then with only the functions being
/// admitted uninterpreted.
pub struct SmtProver {
    pub cfg: EngineConfig,
}

impl SmtProver {
    pub fn new(cfg: EngineConfig) -> Self {
        SmtProver { cfg }
    }
}

const VC_BUDGET: usize = 50;

impl VcProver for SmtProver {
    fn discharge(&mut self, world: &World, opaque: &[String], vc: &TerminationVC) -> Result<bool, String> {
        let body = vc.goal();
        let goal = TypedGoal { vars: body.free_vars_typed(), body };
        let mut cfg = self.cfg.clone();
        cfg.budget = VC_BUDGET;
        let mut called = Vec::new();
        term::calls_in(&goal.body, &mut called);
        let abstract_all: BTreeSet<String> =
            called.iter().filter_map(|c| c.as_call()).map(|(f, _)| f.to_string()).filter(|f| !f.starts_with("Ordinal.")).collect();
        let mut attempts = vec![abstract_all.into_iter().collect::<Vec<_>>()];
        if attempts[0].as_slice() != opaque {
            attempts.push(opaque.to_vec());
        }
        for o in attempts {
            let mut o = o;
            o.extend(opaque.iter().cloned());
            match run(world, &goal, Polarity::Verify, &cfg, &o) {
                Ok(Run { verdict: Verdict::Proved, .. }) => return Ok(true),
                Ok(Run { verdict: Verdict::Refuted(_), .. }) => return Ok(false),
                Ok(_) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
        Ok(false)
    }
}

/// Evaluates a source term in the world, for REPL expressions.
pub fn evaluate(w: &World, t: &Term, env: &[(String, Value)]) -> Result<Value, EvalError> {
    eval::eval(w, t, env)
}
