//! Command line: batch checking of `.iml` files and an interactive loop.

use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::Parser;
use serde_json::{json, Map, Value as Json};

use imandra_core::eval::Evaluator;
use imandra_core::lower::Lowerer;
use imandra_core::syntax::{self, Decl, FunGroup, Span};
use imandra_core::template;
use imandra_core::typecheck;

use crate::driver::{exit_code, Checked, Driver, DriverError, Event};
use crate::engine::Verdict;
use crate::smt::SolverConfig;
use crate::waterfall::WaterfallConfig;

#[derive(Debug, Clone, Parser)]
#[command(name = "mini-imandra", version, about = "Admit recursive definitions and decide conjectures about them")]
pub struct Args {
    /// Files to check; starts the interactive loop when none are given.
    pub files: Vec<PathBuf>,
    /// Solver command line (default `z3 -in`, or $MINI_IMANDRA_SOLVER).
    #[arg(long)]
    pub solver_cmd: Option<String>,
    /// Expansions allowed per unrolling run.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub unroll_limit: Option<u64>,
    /// Maximum nesting of inductions.
    #[arg(long)]
    pub induct_depth: Option<usize>,
    /// Per-query solver time limit in milliseconds.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout_ms: Option<u64>,
    /// Print one JSON record per directive.
    #[arg(long)]
    pub machine: bool,
    /// Trace every unrolling step on stderr.
    #[arg(long)]
    pub trace_unroll: bool,
    /// Trace waterfall steps on stderr.
    #[arg(long)]
    pub trace_waterfall: bool,
}

impl Args {
    pub fn config(&self) -> WaterfallConfig {
        let mut cfg = WaterfallConfig::default();
        cfg.engine.solver = SolverConfig::from_env();
        if let Some(c) = &self.solver_cmd {
            cfg.engine.solver.command = c.clone();
        }
        cfg.engine.solver.timeout_ms = self.timeout_ms;
        if let Some(n) = self.unroll_limit {
            cfg.engine.budget = n as usize;
        }
        if let Some(d) = self.induct_depth {
            cfg.max_depth = d;
        }
        cfg
    }

    pub fn output(&self) -> Output {
        Output { machine: self.machine, trace_unroll: self.trace_unroll, trace_waterfall: self.trace_waterfall }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Output {
    pub machine: bool,
    pub trace_unroll: bool,
    pub trace_waterfall: bool,
}

pub fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Proved => "proved",
        Verdict::Refuted(_) => "refuted",
        Verdict::Instance(_) => "instance",
        Verdict::NoInstanceExists => "no_instance",
        Verdict::Unknown { .. } => "unknown",
    }
}

fn error_name(e: &DriverError) -> &'static str {
    match e {
        DriverError::Parse(_) => "parse_error",
        DriverError::Check(_) => "type_error",
        DriverError::Admission(_) => "admission_error",
        DriverError::Engine(_) => "engine_error",
    }
}

/// Stable machine record of a check.
pub fn record(c: &Checked) -> Json {
    let mut bindings = Map::new();
    if let Some(cx) = c.verdict.counterexample() {
        for (x, v) in &cx.bindings {
            bindings.insert(x.clone(), Json::String(v.to_string()));
        }
    }
    let bound = match &c.verdict {
        Verdict::Unknown { bound, .. } => json!(bound),
        _ => Json::Null,
    };
    json!({
        "directive": c.label,
        "source": c.source,
        "verdict": verdict_name(&c.verdict),
        "bindings": bindings,
        "bound": bound,
        "expansions": c.expansions,
        "millis": c.millis as u64,
    })
}

pub fn human(c: &Checked) -> String {
    let what = match &c.verdict {
        Verdict::Proved => "Proved".to_string(),
        Verdict::Refuted(cx) => format!("Refuted\n  counterexample: {}", cx),
        Verdict::Instance(cx) => format!("Instance\n  witness: {}", cx),
        Verdict::NoInstanceExists => "No instance exists".to_string(),
        Verdict::Unknown { bound, reason } => match reason {
            Some(r) => format!("Unknown ({}; unroll bound {})", r, bound),
            None => format!("Unknown (no answer within {} expansions)", bound),
        },
    };
    let label = if c.label.starts_with("theorem") { c.label.clone() } else { c.source.clone() };
    format!("{}\n  {} [{} expansions, {} ms]", label, what, c.expansions, c.millis)
}

/// Writes one processed declaration; traces go to `trace`.
pub fn report(out: &Output, r: &Result<Event, DriverError>, w: &mut dyn Write, trace: &mut dyn Write) -> std::io::Result<()> {
    match r {
        Ok(Event::Type(n)) if !out.machine => writeln!(w, "type {} admitted", n),
        Ok(Event::Fun(rep)) if !out.machine => {
            for n in &rep.names {
                match rep.measures.iter().find(|(m, _)| m == n) {
                    Some((_, m)) => writeln!(w, "{} admitted (measure {}, {} obligation(s))", n, m, rep.vcs.len())?,
                    None => writeln!(w, "{} admitted", n)?,
                }
            }
            Ok(())
        }
        Ok(Event::Checked(c)) => {
            if out.trace_unroll {
                for s in &c.unroll_trace {
                    writeln!(trace, "{}", s)?;
                }
            }
            if out.trace_waterfall {
                for s in &c.waterfall_trace {
                    writeln!(trace, "{}", s)?;
                }
            }
            if out.machine {
                writeln!(w, "{}", record(c))
            } else {
                writeln!(w, "{}", human(c))
            }
        }
        Ok(_) => Ok(()),
        Err(e) if out.machine => writeln!(w, "{}", json!({ "verdict": error_name(e), "message": e.to_string() })),
        Err(e) => writeln!(w, "error: {}", e),
    }
}

/// Checks the files in order in one session and returns the exit status.
pub fn run_batch(files: &[PathBuf], cfg: WaterfallConfig, out: &Output, w: &mut dyn Write, trace: &mut dyn Write) -> i32 {
    let mut d = Driver::new(cfg);
    let mut all = Vec::new();
    for f in files {
        let src = match std::fs::read_to_string(f) {
            Ok(s) => s,
            Err(e) => {
                let _ = writeln!(w, "error: cannot read {}: {}", f.display(), e);
                return 3;
            }
        };
        let results = match d.run_source(&src) {
            Ok(rs) => rs,
            Err(e) => vec![Err(DriverError::Parse(e))],
        };
        for r in &results {
            let _ = report(out, r, w, trace);
        }
        all.extend(results);
    }
    exit_code(&all)
}

/// Runs a `#` command and returns its output, or `None` for `#quit`.
pub fn command(d: &Driver, line: &str) -> Option<String> {
    let mut parts = line.trim().trim_end_matches(";;").split_whitespace();
    let cmd = parts.next().unwrap_or("");
    let arg = parts.next().unwrap_or("");
    let w = &d.world;
    Some(match cmd {
        "#quit" => return None,
        "#config" => {
            let c = &d.cfg;
            format!(
                "solver: {}\nunroll limit: {}\ninduction depth: {}\ntimeout: {}\ngeneralization budget: {}",
                c.engine.solver.command,
                c.engine.budget,
                c.max_depth,
                c.engine.solver.timeout_ms.map_or("none".into(), |t| format!("{} ms", t)),
                c.cx_budget
            )
        }
        "#show" => show(d, arg),
        "#measure" => match w.fun(arg) {
            Some(f) => match &f.measure {
                Some(m) => format!("{}: measure {} ({:?})", arg, m, f.certificate),
                None => format!("{} is not recursive", arg),
            },
            None => format!("unknown function `{}`", arg),
        },
        "#template" | "#show_lowered" => {
            if w.fun(arg).is_none() {
                return Some(format!("unknown function `{}`", arg));
            }
            let mut l = Lowerer::new(w);
            let name = match l.function(arg, &[]) {
                Ok(n) => n,
                Err(e) => return Some(e.to_string()),
            };
            let prog = l.finish();
            if cmd == "#show_lowered" {
                prog.to_string()
            } else {
                template::template_for(&prog, &name).map(|t| format!("{}: {}", name, t)).unwrap_or_default()
            }
        }
        _ => format!("unknown command `{}`", cmd),
    })
}

fn show(d: &Driver, name: &str) -> String {
    let w = &d.world;
    if let Some(f) = w.fun(name) {
        let defs: Option<Vec<_>> = f.group.iter().map(|g| w.fun(g).and_then(|e| e.decl.clone())).collect();
        return match defs {
            Some(defs) => syntax::pretty(&Decl::Fun(FunGroup { is_rec: f.is_rec, defs, span: Span::default() })),
            None => format!("{} : {} = {}", name, f.scheme.ty, syntax::pretty_expr(&f.body.to_expr())),
        };
    }
    if let Some(t) = w.type_def(name) {
        return match &t.decl {
            Some(td) => syntax::pretty(&Decl::Type(td.clone())),
            None => format!("type {} = {}", name, t.ctors.join(" | ")),
        };
    }
    if let Some(t) = w.theorem(name) {
        return match &t.decl {
            Some(td) => syntax::pretty(&Decl::Theorem(td.clone())),
            None => format!("theorem {} = {}", name, t.body),
        };
    }
    format!("unknown name `{}`", name)
}

/// Whether `line` extends the entry before it: annotations, indented lines
/// and lines opening with a continuation keyword.
fn continues(line: &str) -> bool {
    let t = line.trim_start();
    if t.is_empty() {
        return false;
    }
    let first = t.split_whitespace().next().unwrap_or("");
    t.starts_with("[@@") || line.starts_with([' ', '\t']) || ["else", "then", "in", "and", "with", "|", "->"].contains(&first)
}

/// Evaluates an expression with the last witness bound as `CX.<var>`.
pub fn eval_expr(d: &Driver, e: &syntax::Expr) -> String {
    let (tys, vals) = d.cx_env();
    match typecheck::infer_closed(e, &d.world, &tys) {
        Ok(t) => match Evaluator::new(&d.world).eval(&t, &vals) {
            Ok(v) => format!("- : {} = {}", t.ty, v),
            Err(e) => format!("error: {}", e),
        },
        Err(e) => format!("type error: {}", e),
    }
}

/// Reads declarations, directives, expressions and `#` commands until end of
/// input or `#quit`. Without a prompt a complete declaration is held until
/// the next line, so annotations and continuation lines still attach; `;;`
/// ends an entry immediately.
pub fn repl(d: &mut Driver, out: &Output, input: &mut dyn BufRead, w: &mut dyn Write, trace: &mut dyn Write, prompt: bool) -> std::io::Result<()> {
    let mut buf = String::new();
    let mut held: Option<String> = None;
    loop {
        if prompt {
            write!(w, "{}", if buf.is_empty() { "# " } else { "  " })?;
            w.flush()?;
        }
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            if let Some(text) = held.take() {
                run_entry(d, out, &text, w, trace)?;
            }
            break;
        }
        if let Some(text) = held.take() {
            if continues(&line) {
                buf = text;
                buf.push('\n');
            } else {
                run_entry(d, out, &text, w, trace)?;
            }
        }
        if buf.is_empty() && line.trim().starts_with('#') {
            match command(d, &line) {
                Some(s) => writeln!(w, "{}", s)?,
                None => break,
            }
            continue;
        }
        buf.push_str(&line);
        let ends = buf.trim_end().ends_with(";;");
        let text = buf.trim().trim_end_matches(";;").to_string();
        if text.is_empty() {
            buf.clear();
            continue;
        }
        let me = match syntax::parse_module(&text) {
            Ok(_) if prompt || ends => {
                run_entry(d, out, &text, w, trace)?;
                buf.clear();
                continue;
            }
            Ok(_) => {
                held = Some(text);
                buf.clear();
                continue;
            }
            Err(me) => me,
        };
        match syntax::parse_expr(&text) {
            Ok(e) => {
                writeln!(w, "{}", eval_expr(d, &e))?;
                buf.clear();
            }
            Err(ee) if (me.is_incomplete() || ee.is_incomplete()) && !ends => {}
            Err(_) => {
                report(out, &Err(DriverError::Parse(me)), w, trace)?;
                buf.clear();
            }
        }
    }
    Ok(())
}

fn run_entry(d: &mut Driver, out: &Output, text: &str, w: &mut dyn Write, trace: &mut dyn Write) -> std::io::Result<()> {
    match d.run_source(text) {
        Ok(results) => results.iter().try_for_each(|r| report(out, r, w, trace)),
        Err(e) => report(out, &Err(DriverError::Parse(e)), w, trace),
    }
}
