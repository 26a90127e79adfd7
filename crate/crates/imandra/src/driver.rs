//! Processes declarations and directives in order against an evolving world.

use std::time::Instant;

use imandra_core::defn::{self, AdmissionError, AdmitReport};
use imandra_core::eval::{Counterexample, Value};
use imandra_core::syntax::{self, Decl, Directive, DirectiveKind, ParseError, TheoremDecl};
use imandra_core::typecheck::{self, CheckError, TypedGoal};
use imandra_core::types::Type;
use imandra_core::world::World;

use crate::engine::{self, EngineError, SmtProver, Verdict};
use crate::unroll::TraceStep;
use crate::waterfall::{self, Outcome, WaterfallConfig};

/// Name the last counterexample is bound under.
pub const CX_NAME: &str = "CX";

#[derive(Debug, thiserror::Error)]
pub enum DriverError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("type error: {0}")]
    Check(#[from] CheckError),
    #[error("admission error: {0}")]
    Admission(#[from] AdmissionError),
    #[error("{0}")]
    Engine(#[from] EngineError),
}

/// The result of one `verify`, `instance` or `theorem`.
#[derive(Debug, Clone)]
pub struct Checked {
    /// `verify`, `instance` or `theorem <name>`.
    pub label: String,
    pub source: String,
    pub verdict: Verdict,
    pub expansions: usize,
    pub millis: u128,
    pub unroll_trace: Vec<TraceStep>,
    pub waterfall_trace: Vec<String>,
    pub rule_installed: bool,
}

#[derive(Debug, Clone)]
pub enum Event {
    Type(String),
    Fun(AdmitReport),
    Checked(Checked),
}

pub struct Driver {
    pub world: World,
    pub cfg: WaterfallConfig,
    /// Bindings of the last counterexample or instance, with their types.
    pub cx: Vec<(String, Type, Value)>,
}

impl Driver {
    pub fn new(cfg: WaterfallConfig) -> Self {
        Driver { world: World::new(), cfg, cx: Vec::new() }
    }

    /// Environment binding `CX.x` for each variable of the last witness.
    pub fn cx_env(&self) -> (Vec<(String, Type)>, Vec<(String, Value)>) {
        let tys = self.cx.iter().map(|(x, t, _)| (format!("{}.{}", CX_NAME, x), t.clone())).collect();
        let vals = self.cx.iter().map(|(x, _, v)| (format!("{}.{}", CX_NAME, x), v.clone())).collect();
        (tys, vals)
    }

    /// Parses `src` and processes each declaration, continuing after errors.
    pub fn run_source(&mut self, src: &str) -> Result<Vec<Result<Event, DriverError>>, ParseError> {
        let m = syntax::parse_module(src)?;
        Ok(m.decls.iter().map(|d| self.process(d, src)).collect())
    }

    pub fn process(&mut self, d: &Decl, src: &str) -> Result<Event, DriverError> {
        let span = d.span();
        let text = src.get(span.start..span.end).unwrap_or("").trim().to_string();
        match d {
            Decl::Type(t) => {
                self.world = defn::admit_type(t, &self.world)?;
                Ok(Event::Type(t.name.clone()))
            }
            Decl::Fun(g) => {
                let mut prover = SmtProver::new(self.cfg.engine.clone());
                let (w, report) = defn::admit_group(g, &self.world, &mut prover)?;
                self.world = w;
                Ok(Event::Fun(report))
            }
            Decl::Theorem(t) => self.theorem(t, text).map(Event::Checked),
            Decl::Directive(dir) => self.directive(dir, text).map(Event::Checked),
        }
    }

    fn theorem(&mut self, t: &TheoremDecl, source: String) -> Result<Checked, DriverError> {
        let typed = typecheck::infer_theorem(t, &self.world)?;
        let goal = TypedGoal { vars: typed.params.clone(), body: typed.body.clone() };
        let auto = t.annotations.contains(&syntax::Annotation::Auto);
        let mut c = self.check(&goal, DirectiveKind::Verify, auto, None)?;
        let proved = c.verdict == Verdict::Proved;
        let before = self.world.rules().count();
        self.world = defn::admit_theorem(&typed, &self.world, proved);
        c.rule_installed = self.world.rules().count() > before;
        c.label = format!("theorem {}", t.name);
        c.source = source;
        Ok(c)
    }

    fn directive(&mut self, d: &Directive, source: String) -> Result<Checked, DriverError> {
        let goal = typecheck::infer_goal(&d.goal, &self.world)?;
        let auto = d.annotations.contains(&syntax::Annotation::Auto);
        let bound = d.bound.map(|n| n as usize);
        let mut c = self.check(&goal, d.kind, auto, bound)?;
        c.source = source;
        Ok(c)
    }

    /// Decides a goal: through the waterfall when `auto`, else by unrolling
    /// up to `bound` expansions (the configured budget by default).
    pub fn check(&mut self, goal: &TypedGoal, kind: DirectiveKind, auto: bool, bound: Option<usize>) -> Result<Checked, DriverError> {
        let start = Instant::now();
        let mut ecfg = self.cfg.engine.clone();
        if let Some(n) = bound {
            ecfg.budget = n;
        }
        let label = match kind {
            DirectiveKind::Verify => "verify",
            DirectiveKind::Instance => "instance",
        };
        let mut c = Checked {
            label: label.to_string(),
            source: String::new(),
            verdict: Verdict::Proved,
            expansions: 0,
            millis: 0,
            unroll_trace: Vec::new(),
            waterfall_trace: Vec::new(),
            rule_installed: false,
        };
        if auto && kind == DirectiveKind::Verify {
            let mut wcfg = self.cfg.clone();
            wcfg.engine = ecfg.clone();
            let p = waterfall::prove(goal, &self.world, &wcfg);
            c.waterfall_trace = p.trace;
            c.verdict = match p.outcome {
                Outcome::Proved => Verdict::Proved,
                Outcome::Refuted(cx) => Verdict::Refuted(cx),
                Outcome::GaveUp(why) => Verdict::Unknown { bound: ecfg.budget, reason: Some(why.to_string()) },
            };
        } else {
            let run = match kind {
                DirectiveKind::Verify => engine::verify(&self.world, goal, &ecfg)?,
                DirectiveKind::Instance => engine::instance(&self.world, goal, &ecfg)?,
            };
            c.verdict = run.verdict;
            c.expansions = run.expansions;
            c.unroll_trace = run.trace;
        }
        if let Some(cx) = c.verdict.counterexample() {
            self.bind_cx(goal, cx);
        }
        c.millis = start.elapsed().as_millis();
        Ok(c)
    }

    fn bind_cx(&mut self, goal: &TypedGoal, cx: &Counterexample) {
        self.cx = cx
            .bindings
            .iter()
            .filter_map(|(x, v)| goal.vars.iter().find(|(y, _)| y == x).map(|(_, t)| (x.clone(), t.default_int(), v.clone())))
            .collect();
    }
}

/// Exit status of a batch run: 0 when every check is Proved or an Instance,
/// 1 on a Refuted or NoInstanceExists, 2 on Unknown, 3 on errors.
pub fn exit_code(results: &[Result<Event, DriverError>]) -> i32 {
    let mut code = 0;
    for r in results {
        let c = match r {
            Err(_) => 3,
            Ok(Event::Checked(c)) => match c.verdict {
                Verdict::Proved | Verdict::Instance(_) => 0,
                Verdict::Refuted(_) | Verdict::NoInstanceExists => 1,
                Verdict::Unknown { .. } => 2,
            },
            Ok(_) => 0,
        };
        code = code.max(c);
    }
    code
}
