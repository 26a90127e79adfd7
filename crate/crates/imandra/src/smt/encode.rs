//! Encoding of ground programs and terms as SMT-LIB, and decoding of model
//! values.

use std::collections::BTreeMap;

use imandra_core::eval::Value;
use imandra_core::lower::GroundProgram;
use imandra_core::syntax::BinOp;
use imandra_core::template::normalized_body;
use imandra_core::term::{Term, TermKind};
use imandra_core::types::Type;
use num_bigint::BigInt;

use super::sexp::Sexp;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("cannot encode `{0}` as a ground formula")]
    NotGround(String),
    #[error("cannot read model value `{0}`")]
    BadValue(String),
}

/// Sort and symbol naming for one ground program.
#[derive(Debug, Clone)]
pub struct Encoder<'p> {
    pub prog: &'p GroundProgram,
    tuples: Vec<Vec<Type>>,
}

const FUN: &str = "f!";
const VAR: &str = "v!";
const CTOR: &str = "c!";
const SORT: &str = "T!";

/// An SMT-LIB symbol for `prefix` + `name`, quoted when needed.
pub fn symbol(prefix: &str, name: &str) -> String {
    let s = format!("{}{}", prefix, name);
    let simple = s.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        s
    } else {
        format!("|{}|", s.replace('|', "!").replace('\\', "!"))
    }
}

fn unquote(s: &str) -> &str {
    s.strip_prefix('|').and_then(|s| s.strip_suffix('|')).unwrap_or(s)
}

pub fn var_symbol(x: &str) -> String {
    symbol(VAR, x)
}

pub fn fun_symbol(f: &str) -> String {
    symbol(FUN, f)
}

impl<'p> Encoder<'p> {
    /// `extra` lists types (such as goal variables') that must be declared too.
    pub fn new(prog: &'p GroundProgram, extra: &[Type]) -> Self {
        let mut e = Encoder { prog, tuples: Vec::new() };
        for t in &prog.types {
            for c in &t.ctors {
                c.args.iter().for_each(|a| e.note(a));
            }
        }
        for f in &prog.funs {
            f.params.iter().for_each(|(_, t)| e.note(t));
            e.note(&f.ret);
            e.note_term(&f.body);
        }
        extra.iter().for_each(|t| e.note(t));
        e
    }

    fn note(&mut self, t: &Type) {
        match t {
            Type::Tuple(ts) => {
                ts.iter().for_each(|x| self.note(x));
                if !self.tuples.contains(ts) {
                    self.tuples.push(ts.clone());
                }
            }
            Type::Arrow(a, b) => {
                self.note(a);
                self.note(b);
            }
            _ => {}
        }
    }

    /// Records tuple types occurring anywhere in `t`.
    pub fn note_term(&mut self, t: &Term) {
        self.note(&t.ty);
        t.for_each_child(|c| self.note_term(c));
    }

    fn tuple_index(&self, ts: &[Type]) -> usize {
        self.tuples.iter().position(|x| x == ts).unwrap_or_else(|| panic!("undeclared tuple sort ({})", Type::Tuple(ts.to_vec())))
    }

    fn tuple_sort(&self, ts: &[Type]) -> String {
        format!("Tup!{}", self.tuple_index(ts))
    }

    pub fn sort(&self, t: &Type) -> Sexp {
        match t {
            Type::Int | Type::Var(_) => Sexp::atom("Int"),
            Type::Bool => Sexp::atom("Bool"),
            Type::Adt(n, _) => Sexp::atom(symbol(SORT, n)),
            Type::Tuple(ts) => Sexp::atom(self.tuple_sort(ts)),
            Type::Arrow(..) => panic!("function sort in a ground program"),
        }
    }

    fn selector(c: &str, i: usize) -> String {
        symbol("s!", &format!("{}!{}", c, i))
    }

    /// Datatype and function declarations, in order.
    pub fn declarations(&self) -> Vec<Sexp> {
        let mut out = Vec::new();
        let mut heads = Vec::new();
        let mut bodies = Vec::new();
        for t in &self.prog.types {
            heads.push(Sexp::list([Sexp::atom(symbol(SORT, &t.name)), Sexp::atom("0")]));
            let ctors = t.ctors.iter().map(|c| {
                let mut v = vec![Sexp::atom(symbol(CTOR, &c.name))];
                for (i, a) in c.args.iter().enumerate() {
                    v.push(Sexp::list([Sexp::atom(Self::selector(&c.name, i)), self.sort(a)]));
                }
                Sexp::List(v)
            });
            bodies.push(Sexp::list(ctors));
        }
        for (k, ts) in self.tuples.iter().enumerate() {
            let name = format!("Tup!{}", k);
            heads.push(Sexp::list([Sexp::atom(name.clone()), Sexp::atom("0")]));
            let mut v = vec![Sexp::atom(format!("mk!{}", name))];
            for (i, a) in ts.iter().enumerate() {
                v.push(Sexp::list([Sexp::atom(format!("p!{}!{}", k, i)), self.sort(a)]));
            }
            bodies.push(Sexp::list([Sexp::List(v)]));
        }
        if !heads.is_empty() {
            out.push(Sexp::list([Sexp::atom("declare-datatypes"), Sexp::List(heads), Sexp::List(bodies)]));
        }
        for f in &self.prog.funs {
            out.push(Sexp::list([
                Sexp::atom("declare-fun"),
                Sexp::atom(fun_symbol(&f.name)),
                Sexp::list(f.params.iter().map(|(_, t)| self.sort(t))),
                self.sort(&f.ret),
            ]));
        }
        out
    }

    pub fn declare_const(&self, x: &str, t: &Type) -> Sexp {
        Sexp::list([Sexp::atom("declare-const"), Sexp::atom(var_symbol(x)), self.sort(t)])
    }

    /// Encodes a ground term, first removing `let`, `match` and short-circuit
    /// operators.
    pub fn term(&self, t: &Term) -> Result<Sexp, EncodeError> {
        self.go(&normalized_body(t, self.prog))
    }

    fn go(&self, t: &Term) -> Result<Sexp, EncodeError> {
        let app = |h: &str, args: &[&Term]| -> Result<Sexp, EncodeError> {
            let mut v = vec![Sexp::atom(h)];
            for a in args {
                v.push(self.go(a)?);
            }
            Ok(Sexp::List(v))
        };
        Ok(match &t.kind {
            TermKind::Int(n) => int(n),
            TermKind::Bool(b) => Sexp::atom(if *b { "true" } else { "false" }),
            TermKind::Var(x) => Sexp::atom(var_symbol(x)),
            TermKind::Fun(f, _) if self.prog.fun(f).is_some() => Sexp::atom(fun_symbol(f)),
            TermKind::App(h, args) => match &h.kind {
                TermKind::Fun(f, _) if self.prog.fun(f).is_some() => {
                    let mut v = vec![Sexp::atom(fun_symbol(f))];
                    for a in args {
                        v.push(self.go(a)?);
                    }
                    Sexp::List(v)
                }
                _ => return Err(EncodeError::NotGround(t.to_string())),
            },
            TermKind::If(c, a, b) => app("ite", &[c, a, b])?,
            TermKind::Ctor(c, xs) => {
                let mut v = vec![Sexp::atom(symbol(CTOR, c))];
                for x in xs {
                    v.push(self.go(x)?);
                }
                if xs.is_empty() {
                    v.pop().unwrap()
                } else {
                    Sexp::List(v)
                }
            }
            TermKind::Tuple(xs) => {
                let ts = match &t.ty {
                    Type::Tuple(ts) => ts,
                    _ => return Err(EncodeError::NotGround(t.to_string())),
                };
                let mut v = vec![Sexp::atom(format!("mk!{}", self.tuple_sort(ts)))];
                for x in xs {
                    v.push(self.go(x)?);
                }
                Sexp::List(v)
            }
            TermKind::Proj(i, a) => {
                let ts = match &a.ty {
                    Type::Tuple(ts) => ts,
                    _ => return Err(EncodeError::NotGround(t.to_string())),
                };
                Sexp::list([Sexp::atom(format!("p!{}!{}", self.tuple_index(ts), i)), self.go(a)?])
            }
            TermKind::Bin(op, a, b) => {
                let h = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Eq => "=",
                    BinOp::Lt => "<",
                    BinOp::Le => "<=",
                    BinOp::Gt => ">",
                    BinOp::Ge => ">=",
                    BinOp::And => "and",
                    BinOp::Or => "or",
                };
                app(h, &[a, b])?
            }
            TermKind::Not(a) => app("not", &[a])?,
            TermKind::IsCtor(c, a) => Sexp::list([
                Sexp::list([Sexp::atom("_"), Sexp::atom("is"), Sexp::atom(symbol(CTOR, c))]),
                self.go(a)?,
            ]),
            TermKind::Select(c, i, a) => Sexp::list([Sexp::atom(Self::selector(c, *i)), self.go(a)?]),
            TermKind::Let(..) | TermKind::Match(..) | TermKind::Lambda(..) | TermKind::Fun(..) => {
                return Err(EncodeError::NotGround(t.to_string()))
            }
        })
    }

    /// Reads a model value of ground type `ty`.
    pub fn value(&self, s: &Sexp, ty: &Type) -> Result<Value, EncodeError> {
        self.read(&expand_lets(s, &BTreeMap::new()), ty)
    }

    fn read(&self, s: &Sexp, ty: &Type) -> Result<Value, EncodeError> {
        let bad = || EncodeError::BadValue(s.to_string());
        // `(as C T)` annotations carry no information we need
        if let Some([h, inner, _]) = s.as_list() {
            if h.is_atom("as") {
                return self.read(inner, ty);
            }
        }
        match ty {
            Type::Int | Type::Var(_) => read_int(s).map(Value::Int).ok_or_else(bad),
            Type::Bool => match s.as_atom() {
                Some("true") => Ok(Value::Bool(true)),
                Some("false") => Ok(Value::Bool(false)),
                _ => Err(bad()),
            },
            Type::Tuple(ts) => {
                let xs = s.as_list().ok_or_else(bad)?;
                if xs.len() != ts.len() + 1 {
                    return Err(bad());
                }
                Ok(Value::Tuple(xs[1..].iter().zip(ts).map(|(x, t)| self.read(x, t)).collect::<Result<_, _>>()?))
            }
            Type::Adt(..) => {
                let (head, args) = match s {
                    Sexp::Atom(a) => (a.as_str(), &[][..]),
                    Sexp::List(xs) if !xs.is_empty() => (xs[0].as_atom().ok_or_else(bad)?, &xs[1..]),
                    _ => return Err(bad()),
                };
                let name = unquote(head).strip_prefix(CTOR).ok_or_else(bad)?;
                let (_, _, c) = self.prog.ctor(name).ok_or_else(bad)?;
                if c.args.len() != args.len() {
                    return Err(bad());
                }
                let vs = args.iter().zip(&c.args).map(|(a, t)| self.read(a, t)).collect::<Result<_, _>>()?;
                Ok(Value::Ctor(name.to_string(), vs))
            }
            Type::Arrow(..) => Err(bad()),
        }
    }
}

pub fn int(n: &BigInt) -> Sexp {
    if n.sign() == num_bigint::Sign::Minus {
        Sexp::list([Sexp::atom("-"), Sexp::atom((-n).to_string())])
    } else {
        Sexp::atom(n.to_string())
    }
}

fn read_int(s: &Sexp) -> Option<BigInt> {
    match s {
        Sexp::Atom(a) => a.parse().ok(),
        Sexp::List(xs) => match xs.as_slice() {
            [m, x] if m.is_atom("-") => read_int(x).map(|n| -n),
            _ => None,
        },
    }
}

/// Substitutes away `let` binders in solver output.
fn expand_lets(s: &Sexp, env: &BTreeMap<String, Sexp>) -> Sexp {
    match s {
        Sexp::Atom(a) => env.get(a).cloned().unwrap_or_else(|| s.clone()),
        Sexp::List(xs) => {
            if let [h, Sexp::List(binds), body] = xs.as_slice() {
                if h.is_atom("let") {
                    let mut env2 = env.clone();
                    for b in binds {
                        if let Some([Sexp::Atom(x), v]) = b.as_list() {
                            env2.insert(x.clone(), expand_lets(v, env));
                        }
                    }
                    return expand_lets(body, &env2);
                }
            }
            Sexp::List(xs.iter().map(|x| expand_lets(x, env)).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smt::sexp::parse_one;

    #[test]
    fn symbols_are_quoted_when_needed() {
        assert_eq!(symbol("v!", "x"), "v!x");
        assert_eq!(symbol("v!", "x'"), "|v!x'|");
        assert_eq!(unquote("|v!x'|"), "v!x'");
    }

    #[test]
    fn integers() {
        assert_eq!(int(&BigInt::from(-3)).to_string(), "(- 3)");
        assert_eq!(read_int(&parse_one("(- 3)").unwrap()), Some(BigInt::from(-3)));
        assert_eq!(read_int(&parse_one("12").unwrap()), Some(BigInt::from(12)));
    }

    #[test]
    fn lets_in_values_are_expanded() {
        let s = parse_one("(let ((a!1 (c!Cons_int 1 c!Nil_int))) (c!Cons_int 0 a!1))").unwrap();
        assert_eq!(expand_lets(&s, &BTreeMap::new()).to_string(), "(c!Cons_int 0 (c!Cons_int 1 c!Nil_int))");
    }
}
