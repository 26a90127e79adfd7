//! A live SMT-LIB session with a solver subprocess.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use super::sexp::{self, Sexp};

pub const DEFAULT_SOLVER: &str = "z3 -in";
pub const SOLVER_ENV: &str = "MINI_IMANDRA_SOLVER";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Command line, split on whitespace.
    pub command: String,
    /// Per-query limit in milliseconds.
    pub timeout_ms: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { command: DEFAULT_SOLVER.to_string(), timeout_ms: None }
    }
}

impl SolverConfig {
    /// The default configuration with `MINI_IMANDRA_SOLVER` applied.
    pub fn from_env() -> Self {
        let mut c = SolverConfig::default();
        if let Ok(cmd) = std::env::var(SOLVER_ENV) {
            if !cmd.trim().is_empty() {
                c.command = cmd;
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("cannot start solver `{0}`: {1}")]
    Start(String, String),
    #[error("solver i/o failed: {0}")]
    Io(String),
    #[error("solver error on `{command}`: {message}")]
    Protocol { command: String, message: String },
    #[error("solver did not answer in time")]
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Sat,
    /// The subset of the assumptions the solver reported.
    Unsat(Vec<Sexp>),
    Unknown(String),
}

pub struct Session {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    pending: String,
    /// Every command sent, in order.
    pub log: Vec<String>,
    config: SolverConfig,
}

impl Session {
    pub fn start(config: &SolverConfig) -> Result<Session, SolverError> {
        let mut parts = config.command.split_whitespace();
        let prog = parts.next().ok_or_else(|| SolverError::Start(config.command.clone(), "empty command".into()))?;
        let mut child = Command::new(prog)
            .args(parts)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SolverError::Start(config.command.clone(), e.to_string()))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                match line {
                    Ok(l) => {
                        if tx.send(l).is_err() {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
        });
        let mut s = Session { child, stdin, lines: rx, pending: String::new(), log: Vec::new(), config: config.clone() };
        s.command(&parse("(set-option :print-success true)"))
            .map_err(|e| SolverError::Start(config.command.clone(), e.to_string()))?;
        s.command(&parse("(set-option :produce-models true)"))?;
        s.command(&parse("(set-option :produce-unsat-assumptions true)"))?;
        if !config.command.contains("cvc5") {
            s.command(&parse("(set-option :smt.core.minimize true)"))?;
        }
        if let Some(ms) = config.timeout_ms {
            let opt = if config.command.contains("cvc5") { "tlimit-per" } else { "timeout" };
            s.command(&parse(&format!("(set-option :{} {})", opt, ms)))?;
        }
        Ok(s)
    }

    fn send(&mut self, cmd: &Sexp) -> Result<(), SolverError> {
        let text = cmd.to_string();
        writeln!(self.stdin, "{}", text).and_then(|_| self.stdin.flush()).map_err(|e| SolverError::Io(e.to_string()))?;
        self.log.push(text);
        Ok(())
    }

    fn read(&mut self) -> Result<Sexp, SolverError> {
        let wait = Duration::from_millis(self.config.timeout_ms.map_or(600_000, |ms| ms * 2 + 5_000));
        loop {
            if let Some(n) = sexp::complete_prefix(&self.pending) {
                let text: String = self.pending.drain(..n).collect();
                return sexp::parse_one(&text).map_err(|e| SolverError::Io(e.to_string()));
            }
            match self.lines.recv_timeout(wait) {
                Ok(l) => {
                    self.pending.push_str(&l);
                    self.pending.push('\n');
                }
                Err(RecvTimeoutError::Timeout) => return Err(SolverError::Timeout),
                Err(RecvTimeoutError::Disconnected) => return Err(SolverError::Io("solver exited".into())),
            }
        }
    }

    fn reply(&mut self, cmd: &Sexp) -> Result<Sexp, SolverError> {
        self.send(cmd)?;
        let r = self.read()?;
        if let Some([head, msg]) = r.as_list() {
            if head.is_atom("error") {
                return Err(SolverError::Protocol { command: cmd.to_string(), message: msg.to_string() });
            }
        }
        Ok(r)
    }

    /// Sends a command that answers `success`.
    pub fn command(&mut self, cmd: &Sexp) -> Result<(), SolverError> {
        let r = self.reply(cmd)?;
        if r.is_atom("success") {
            Ok(())
        } else {
            Err(SolverError::Protocol { command: cmd.to_string(), message: r.to_string() })
        }
    }

    pub fn assert(&mut self, f: Sexp) -> Result<(), SolverError> {
        self.command(&Sexp::list([Sexp::atom("assert"), f]))
    }

    pub fn check_sat_assuming(&mut self, assumptions: &[Sexp]) -> Result<CheckResult, SolverError> {
        let cmd = Sexp::list([Sexp::atom("check-sat-assuming"), Sexp::list(assumptions.iter().cloned())]);
        let r = self.reply(&cmd)?;
        match r.as_atom() {
            Some("sat") => Ok(CheckResult::Sat),
            Some("unsat") => {
                let core = self.reply(&parse("(get-unsat-assumptions)"))?;
                match core {
                    Sexp::List(xs) => Ok(CheckResult::Unsat(xs)),
                    other => Err(SolverError::Protocol { command: "(get-unsat-assumptions)".into(), message: other.to_string() }),
                }
            }
            Some("unknown") => {
                let why = self.reply(&parse("(get-info :reason-unknown)")).map(|r| r.to_string()).unwrap_or_default();
                Ok(CheckResult::Unknown(why))
            }
            _ => Err(SolverError::Protocol { command: cmd.to_string(), message: r.to_string() }),
        }
    }

    pub fn check_sat(&mut self) -> Result<CheckResult, SolverError> {
        self.check_sat_assuming(&[])
    }

    /// Values of `terms` in the last model, in order.
    pub fn get_values(&mut self, terms: &[Sexp]) -> Result<Vec<Sexp>, SolverError> {
        if terms.is_empty() {
            return Ok(Vec::new());
        }
        let cmd = Sexp::list([Sexp::atom("get-value"), Sexp::list(terms.iter().cloned())]);
        let r = self.reply(&cmd)?;
        let pairs = r.as_list().ok_or_else(|| SolverError::Protocol { command: cmd.to_string(), message: r.to_string() })?;
        pairs
            .iter()
            .map(|p| match p.as_list() {
                Some([_, v]) => Ok(v.clone()),
                _ => Err(SolverError::Protocol { command: cmd.to_string(), message: p.to_string() }),
            })
            .collect()
    }

    pub fn get_model(&mut self) -> Result<Sexp, SolverError> {
        self.reply(&parse("(get-model)"))
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        let _ = writeln!(self.stdin, "(exit)");
        let _ = self.stdin.flush();
        if self.child.try_wait().ok().flatten().is_none() {
            thread::sleep(Duration::from_millis(1));
            if self.child.try_wait().ok().flatten().is_none() {
                let _ = self.child.kill();
            }
        }
        let _ = self.child.wait();
    }
}

fn parse(text: &str) -> Sexp {
    sexp::parse_one(text).expect("well-formed built-in command")
}
