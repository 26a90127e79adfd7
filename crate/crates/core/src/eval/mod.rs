//! Big-step call-by-value evaluation of source and ground programs, value
//! reflection and counterexample confirmation.

use alloc::boxed::Box;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::lower::GroundProgram;
use crate::ordinal::Ordinal;
use crate::syntax::BinOp;
use crate::term::{Pat, Term, TermKind};
use crate::types::{self, Type};
use crate::world::World;

pub const DEFAULT_FUEL: u64 = 10_000_000;
pub const DEFAULT_MAX_DEPTH: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Ctor(String, Vec<Value>),
    Tuple(Vec<Value>),
    /// An anonymous function with its captured environment.
    Closure(Rc<Closure>),
    /// A global function applied to fewer arguments than it takes.
    Partial(String, Vec<Value>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Closure {
    pub params: Vec<String>,
    pub body: Term,
    pub env: Vec<(String, Value)>,
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Int(n.into())
    }

    pub fn list(items: impl IntoIterator<Item = Value, IntoIter: DoubleEndedIterator>) -> Value {
        items.into_iter().rev().fold(Value::Ctor(types::NIL.into(), Vec::new()), |acc, v| Value::Ctor(types::CONS.into(), alloc::vec![v, acc]))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            Value::Ctor(_, xs) => 1 + xs.iter().map(Value::size).sum::<usize>(),
            Value::Tuple(xs) => xs.iter().map(Value::size).sum(),
            _ => 0,
        }
    }

    /// Elements of a source list value.
    pub fn list_items(&self) -> Option<Vec<&Value>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Ctor(c, xs) if c == types::NIL && xs.is_empty() => return Some(out),
                Value::Ctor(c, xs) if c == types::CONS && xs.len() == 2 => {
                    out.push(&xs[0]);
                    cur = &xs[1];
                }
                _ => return None,
            }
        }
    }

    /// Reads an `Ordinal.t` value.
    pub fn to_ordinal(&self) -> Option<Ordinal> {
        match self {
            Value::Ctor(c, xs) if c == types::ORD_INT && xs.len() == 1 => Some(crate::ordinal::of_int(xs[0].as_int()?)),
            Value::Ctor(c, xs) if c == types::ORD_CONS && xs.len() == 3 => {
                let e = xs[0].to_ordinal()?;
                let k = xs[1].as_int()?;
                let r = xs[2].to_ordinal()?;
                if !k.is_positive() {
                    return Some(r);
                }
                let head = if e.is_zero() {
                    Ordinal::Fin(k.magnitude().clone())
                } else {
                    Ordinal::Cons(Box::new(e), k.magnitude().clone(), Box::new(Ordinal::Fin(Zero::zero())))
                };
                Some(crate::ordinal::plus(&head, &r))
            }
            _ => None,
        }
    }

    pub fn from_ordinal(o: &Ordinal) -> Value {
        match o {
            Ordinal::Fin(n) => Value::Ctor(types::ORD_INT.into(), alloc::vec![Value::Int(BigInt::from(n.clone()))]),
            Ordinal::Cons(e, k, r) => Value::Ctor(
                types::ORD_CONS.into(),
                alloc::vec![Value::from_ordinal(e), Value::Int(BigInt::from(k.clone())), Value::from_ordinal(r)],
            ),
        }
    }

    /// The value as a term of type `ty`.
    pub fn to_term(&self, ty: &Type, ctor_args: &dyn Fn(&str, &Type) -> Vec<Type>) -> Term {
        match self {
            Value::Int(n) => Term::int(n.clone()),
            Value::Bool(b) => Term::bool(*b),
            Value::Tuple(xs) => {
                let tys = match ty {
                    Type::Tuple(ts) => ts.clone(),
                    _ => alloc::vec![Type::Int; xs.len()],
                };
                Term::new(TermKind::Tuple(xs.iter().zip(&tys).map(|(x, t)| x.to_term(t, ctor_args)).collect()), ty.clone())
            }
            Value::Ctor(c, xs) => {
                let tys = ctor_args(c, ty);
                let args = xs.iter().enumerate().map(|(i, x)| x.to_term(tys.get(i).unwrap_or(&Type::Int), ctor_args)).collect();
                Term::new(TermKind::Ctor(c.clone(), args), ty.clone())
            }
            Value::Closure(c) => Term::new(
                TermKind::Lambda(c.params.iter().map(|p| (p.clone(), Type::Int)).collect(), Box::new(c.body.clone())),
                ty.clone(),
            ),
            Value::Partial(f, xs) => {
                let head = Term::new(TermKind::Fun(f.clone(), Vec::new()), ty.clone());
                if xs.is_empty() {
                    head
                } else {
                    let args = xs.iter().map(|x| x.to_term(&Type::Int, ctor_args)).collect();
                    Term::new(TermKind::App(Box::new(head), args), ty.clone())
                }
            }
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(v: &Value) -> bool {
            match v {
                Value::Ctor(_, xs) => xs.is_empty() || v.list_items().is_some(),
                Value::Int(n) => !n.is_negative(),
                Value::Partial(_, xs) => xs.is_empty(),
                _ => true,
            }
        }
        fn show(v: &Value, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
            if nested && !atom(v) {
                write!(f, "(")?;
                show(v, f, false)?;
                return write!(f, ")");
            }
            match v {
                Value::Int(n) => write!(f, "{}", n),
                Value::Bool(b) => write!(f, "{}", b),
                Value::Tuple(xs) => {
                    write!(f, "(")?;
                    for (i, x) in xs.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        show(x, f, false)?;
                    }
                    write!(f, ")")
                }
                Value::Ctor(..) if v.list_items().is_some() => {
                    write!(f, "[")?;
                    for (i, x) in v.list_items().unwrap().into_iter().enumerate() {
                        if i > 0 {
                            write!(f, "; ")?;
                        }
                        show(x, f, false)?;
                    }
                    write!(f, "]")
                }
                Value::Ctor(c, xs) if xs.is_empty() => write!(f, "{}", c),
                Value::Ctor(c, xs) if xs.len() == 1 => {
                    write!(f, "{} ", c)?;
                    show(&xs[0], f, true)
                }
                Value::Ctor(c, xs) => {
                    write!(f, "{} ", c)?;
                    show(&Value::Tuple(xs.clone()), f, false)
                }
                Value::Closure(c) => write!(f, "<fun {}>", c.params.join(" ")),
                Value::Partial(name, xs) => {
                    write!(f, "{}", name)?;
                    for x in xs {
                        write!(f, " ")?;
                        show(x, f, true)?;
                    }
                    Ok(())
                }
            }
        }
        show(self, f, false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("evaluation ran out of fuel")]
    FuelExhausted,
    #[error("call depth limit exceeded")]
    DepthExceeded,
    #[error("no pattern matches {0}")]
    MatchFailure(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("selector `{0}` applied to another constructor")]
    BadSelector(String),
    #[error("type mismatch: {0}")]
    Mismatch(String),
}

type Result<T> = core::result::Result<T, EvalError>;

/// Function definitions the evaluator can call.
pub trait Program {
    fn definition(&self, name: &str) -> Option<(&[(String, Type)], &Term)>;
}

impl Program for World {
    fn definition(&self, name: &str) -> Option<(&[(String, Type)], &Term)> {
        self.fun(name).map(|f| (f.params.as_slice(), &f.body))
    }
}

impl Program for GroundProgram {
    fn definition(&self, name: &str) -> Option<(&[(String, Type)], &Term)> {
        self.fun(name).map(|f| (f.params.as_slice(), &f.body))
    }
}

/// One executed function call; `parent` indexes the caller's record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallRecord {
    pub name: String,
    pub args: Vec<Value>,
    pub parent: Option<usize>,
}

pub struct Evaluator<'p, P: Program + ?Sized> {
    prog: &'p P,
    pub fuel: u64,
    pub max_depth: usize,
    depth: usize,
    trace: Option<Vec<CallRecord>>,
    current: Option<usize>,
}

impl<'p, P: Program + ?Sized> Evaluator<'p, P> {
    pub fn new(prog: &'p P) -> Self {
        Evaluator { prog, fuel: DEFAULT_FUEL, max_depth: DEFAULT_MAX_DEPTH, depth: 0, trace: None, current: None }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn with_max_depth(mut self, d: usize) -> Self {
        self.max_depth = d;
        self
    }

    /// Records every call made from now on.
    pub fn traced(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn take_trace(&mut self) -> Vec<CallRecord> {
        self.trace.as_mut().map(core::mem::take).unwrap_or_default()
    }

    pub fn eval(&mut self, t: &Term, env: &[(String, Value)]) -> Result<Value> {
        let mut env = env.to_vec();
        self.go(t, &mut env)
    }

    /// Calls a global function on argument values.
    pub fn call(&mut self, name: &str, args: Vec<Value>) -> Result<Value> {
        let (params, body) = self.prog.definition(name).ok_or_else(|| EvalError::UnknownFunction(name.to_string()))?;
        if args.len() < params.len() {
            return Ok(Value::Partial(name.to_string(), args));
        }
        if self.fuel == 0 {
            return Err(EvalError::FuelExhausted);
        }
        self.fuel -= 1;
        if self.depth >= self.max_depth {
            return Err(EvalError::DepthExceeded);
        }
        let n = params.len();
        let mut rest = args;
        let now: Vec<Value> = rest.drain(..n).collect();
        let saved = self.current;
        if let Some(tr) = self.trace.as_mut() {
            tr.push(CallRecord { name: name.to_string(), args: now.clone(), parent: saved });
            self.current = Some(tr.len() - 1);
        }
        let mut env: Vec<(String, Value)> = params.iter().map(|(x, _)| x.clone()).zip(now).collect();
        self.depth += 1;
        let r = self.go(body, &mut env);
        self.depth -= 1;
        self.current = saved;
        let v = r?;
        if rest.is_empty() {
            Ok(v)
        } else {
            self.apply(v, rest)
        }
    }

    fn apply(&mut self, f: Value, args: Vec<Value>) -> Result<Value> {
        if args.is_empty() {
            return Ok(f);
        }
        match f {
            Value::Partial(name, mut have) => {
                have.extend(args);
                self.call(&name, have)
            }
            Value::Closure(c) => {
                let n = c.params.len();
                if args.len() < n {
                    // curry by wrapping the remaining parameters
                    let mut env = c.env.clone();
                    let k = args.len();
                    env.extend(c.params[..k].iter().cloned().zip(args));
                    return Ok(Value::Closure(Rc::new(Closure { params: c.params[k..].to_vec(), body: c.body.clone(), env })));
                }
                let mut rest = args;
                let now: Vec<Value> = rest.drain(..n).collect();
                let mut env = c.env.clone();
                env.extend(c.params.iter().cloned().zip(now));
                if self.fuel == 0 {
                    return Err(EvalError::FuelExhausted);
                }
                self.fuel -= 1;
                let v = self.go(&c.body, &mut env)?;
                self.apply(v, rest)
            }
            other => Err(EvalError::Mismatch(format!("{} is not a function", other))),
        }
    }

    fn go(&mut self, t: &Term, env: &mut Vec<(String, Value)>) -> Result<Value> {
        match &t.kind {
            TermKind::Int(n) => Ok(Value::Int(n.clone())),
            TermKind::Bool(b) => Ok(Value::Bool(*b)),
            TermKind::Var(x) => env.iter().rev().find(|(y, _)| y == x).map(|(_, v)| v.clone()).ok_or_else(|| EvalError::Unbound(x.clone())),
            TermKind::Fun(f, _) => self.call(f, Vec::new()),
            TermKind::App(h, args) => {
                let mut vs = Vec::with_capacity(args.len());
                if let TermKind::Fun(f, _) = &h.kind {
                    for a in args {
                        vs.push(self.go(a, env)?);
                    }
                    return self.call(f, vs);
                }
                let hv = self.go(h, env)?;
                for a in args {
                    vs.push(self.go(a, env)?);
                }
                self.apply(hv, vs)
            }
            TermKind::Lambda(ps, b) => Ok(Value::Closure(Rc::new(Closure {
                params: ps.iter().map(|(x, _)| x.clone()).collect(),
                body: (**b).clone(),
                env: env.clone(),
            }))),
            TermKind::Let(x, a, b) => {
                let v = self.go(a, env)?;
                env.push((x.clone(), v));
                let r = self.go(b, env);
                env.pop();
                r
            }
            TermKind::If(c, a, b) => match self.go(c, env)? {
                Value::Bool(true) => self.go(a, env),
                Value::Bool(false) => self.go(b, env),
                v => Err(EvalError::Mismatch(format!("condition evaluated to {}", v))),
            },
            TermKind::Match(s, bs) => {
                let v = self.go(s, env)?;
                for (p, b) in bs {
                    let mark = env.len();
                    if matches(p, &v, env) {
                        let r = self.go(b, env);
                        env.truncate(mark);
                        return r;
                    }
                    env.truncate(mark);
                }
                Err(EvalError::MatchFailure(format!("{}", v)))
            }
            TermKind::Ctor(c, xs) => {
                let mut vs = Vec::with_capacity(xs.len());
                for x in xs {
                    vs.push(self.go(x, env)?);
                }
                Ok(Value::Ctor(c.clone(), vs))
            }
            TermKind::Tuple(xs) => {
                let mut vs = Vec::with_capacity(xs.len());
                for x in xs {
                    vs.push(self.go(x, env)?);
                }
                Ok(Value::Tuple(vs))
            }
            TermKind::Bin(op, a, b) => {
                let av = self.go(a, env)?;
                match (op, &av) {
                    (BinOp::And, Value::Bool(false)) => return Ok(av),
                    (BinOp::Or, Value::Bool(true)) => return Ok(av),
                    (BinOp::And | BinOp::Or, _) => return self.go(b, env),
                    _ => {}
                }
                let bv = self.go(b, env)?;
                bin(*op, av, bv)
            }
            TermKind::Not(a) => match self.go(a, env)? {
                Value::Bool(b) => Ok(Value::Bool(!b)),
                v => Err(EvalError::Mismatch(format!("not applied to {}", v))),
            },
            TermKind::IsCtor(c, a) => match self.go(a, env)? {
                Value::Ctor(d, _) => Ok(Value::Bool(*c == d)),
                v => Err(EvalError::Mismatch(format!("constructor test on {}", v))),
            },
            TermKind::Select(c, i, a) => match self.go(a, env)? {
                Value::Ctor(d, mut xs) if *c == d && *i < xs.len() => Ok(xs.swap_remove(*i)),
                _ => Err(EvalError::BadSelector(c.clone())),
            },
            TermKind::Proj(i, a) => match self.go(a, env)? {
                Value::Tuple(mut xs) if *i < xs.len() => Ok(xs.swap_remove(*i)),
                v => Err(EvalError::Mismatch(format!("projection from {}", v))),
            },
        }
    }
}

fn bin(op: BinOp, a: Value, b: Value) -> Result<Value> {
    match (op, &a, &b) {
        (BinOp::Eq, _, _) => Ok(Value::Bool(a == b)),
        (_, Value::Int(x), Value::Int(y)) => Ok(match op {
            BinOp::Add => Value::Int(x + y),
            BinOp::Sub => Value::Int(x - y),
            BinOp::Mul => Value::Int(x * y),
            BinOp::Lt => Value::Bool(x < y),
            BinOp::Le => Value::Bool(x <= y),
            BinOp::Gt => Value::Bool(x > y),
            BinOp::Ge => Value::Bool(x >= y),
            _ => return Err(EvalError::Mismatch(format!("{} on integers", op.symbol()))),
        }),
        _ => Err(EvalError::Mismatch(format!("{} {} {}", a, op.symbol(), b))),
    }
}

/// Matches `v` against `p`, pushing bindings onto `env`.
pub fn matches(p: &Pat, v: &Value, env: &mut Vec<(String, Value)>) -> bool {
    match (p, v) {
        (Pat::Wild, _) => true,
        (Pat::Var(x), _) => {
            env.push((x.clone(), v.clone()));
            true
        }
        (Pat::Int(n), Value::Int(m)) => n == m,
        (Pat::Bool(a), Value::Bool(b)) => a == b,
        (Pat::Tuple(ps), Value::Tuple(vs)) => ps.len() == vs.len() && ps.iter().zip(vs).all(|(p, v)| matches(p, v, env)),
        (Pat::Ctor(c, ps), Value::Ctor(d, vs)) => {
            c == d && (ps.len() == vs.len() || ps.is_empty()) && ps.iter().zip(vs).all(|(p, v)| matches(p, v, env))
        }
        _ => false,
    }
}

/// Evaluates `t` with the default fuel.
pub fn eval<P: Program + ?Sized>(prog: &P, t: &Term, env: &[(String, Value)]) -> Result<Value> {
    Evaluator::new(prog).eval(t, env)
}

// ------------------------------------------------------------ reflection

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot reflect constructor `{0}`")]
pub struct ReflectError(pub String);

/// Maps a value over ground constructors back to source constructors.
pub fn to_source(v: &Value, gp: &GroundProgram) -> core::result::Result<Value, ReflectError> {
    match v {
        Value::Ctor(c, xs) => {
            let (_, _, k) = gp.ctor(c).ok_or_else(|| ReflectError(c.clone()))?;
            let args = xs.iter().map(|x| to_source(x, gp)).collect::<core::result::Result<Vec<_>, _>>()?;
            Ok(Value::Ctor(k.source.clone(), args))
        }
        Value::Tuple(xs) => Ok(Value::Tuple(xs.iter().map(|x| to_source(x, gp)).collect::<core::result::Result<Vec<_>, _>>()?)),
        _ => Ok(v.clone()),
    }
}

/// Maps a source value of source type `ty` to the ground program's constructors.
pub fn to_ground(v: &Value, ty: &Type, world: &World, gp: &GroundProgram) -> Option<Value> {
    match (v, ty) {
        (Value::Tuple(xs), Type::Tuple(ts)) => {
            Some(Value::Tuple(xs.iter().zip(ts).map(|(x, t)| to_ground(x, t, world, gp)).collect::<Option<Vec<_>>>()?))
        }
        (Value::Ctor(c, xs), Type::Adt(..)) => {
            let ty = ty.default_int();
            let gt = gp.types.iter().find(|t| t.source == ty)?;
            let gc = gt.ctors.iter().find(|k| k.source == *c)?;
            let arg_tys = world.ctor_args_at(c, &ty);
            let args = xs.iter().zip(&arg_tys).map(|(x, t)| to_ground(x, t, world, gp)).collect::<Option<Vec<_>>>()?;
            Some(Value::Ctor(gc.name.clone(), args))
        }
        _ => Some(v.clone()),
    }
}

// -------------------------------------------------------- counterexamples

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// The goal should be true; a witness makes it false.
    Verify,
    /// The goal should be satisfiable; a witness makes it true.
    Instance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub bindings: Vec<(String, Value)>,
    pub confirmed: bool,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bs: Vec<String> = self.bindings.iter().map(|(x, v)| format!("{} = {}", x, v)).collect();
        write!(f, "{}", bs.join("; "))
    }
}

/// Runs the goal on the witness and records whether it behaves as claimed.
pub fn check_cx<P: Program + ?Sized>(prog: &P, goal: &Term, cx: &mut Counterexample, pol: Polarity) -> Result<bool> {
    cx.confirmed = false;
    let v = eval(prog, goal, &cx.bindings)?;
    cx.confirmed = match (v, pol) {
        (Value::Bool(b), Polarity::Verify) => !b,
        (Value::Bool(b), Polarity::Instance) => b,
        (v, _) => return Err(EvalError::Mismatch(format!("goal evaluated to {}", v))),
    };
    Ok(cx.confirmed)
}

// --------------------------------------------------------- random values

/// A random value of source type `ty` with at most `size` constructor
/// nesting; `pick(n)` must return a number below `n`.
pub fn arbitrary_value(world: &World, ty: &Type, size: usize, pick: &mut dyn FnMut(u64) -> u64) -> Value {
    match ty {
        Type::Int | Type::Var(_) => {
            let span = 2 * size as u64 + 1;
            let n = pick(span) as i64 - size as i64;
            Value::int(n)
        }
        Type::Bool => Value::Bool(pick(2) == 1),
        Type::Tuple(ts) => Value::Tuple(ts.iter().map(|t| arbitrary_value(world, t, size, pick)).collect()),
        Type::Adt(name, _) => {
            let ctors = world.ctors_of(ty);
            let recursive = |args: &[Type]| args.iter().any(|a| mentions(a, name));
            let base: Vec<&(String, Vec<Type>)> = ctors.iter().filter(|(_, a)| !recursive(a)).collect();
            let choice = if size == 0 && !base.is_empty() {
                base[pick(base.len() as u64) as usize]
            } else {
                &ctors[pick(ctors.len() as u64) as usize]
            };
            let sub = size.saturating_sub(1);
            Value::Ctor(choice.0.clone(), choice.1.iter().map(|t| arbitrary_value(world, t, sub, pick)).collect())
        }
        Type::Arrow(..) => Value::Partial(String::from("<arbitrary>"), Vec::new()),
    }
}

fn mentions(t: &Type, name: &str) -> bool {
    match t {
        Type::Adt(n, args) => n == name || args.iter().any(|a| mentions(a, name)),
        Type::Tuple(ts) => ts.iter().any(|a| mentions(a, name)),
        Type::Arrow(a, b) => mentions(a, name) || mentions(b, name),
        _ => false,
    }
}

/// Integer value as `i64` when it fits.
pub fn small_int(v: &Value) -> Option<i64> {
    v.as_int().and_then(ToPrimitive::to_i64)
}
