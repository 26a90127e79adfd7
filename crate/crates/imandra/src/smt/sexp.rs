//! S-expressions as spoken by SMT-LIB solvers.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into())
    }

    pub fn list(items: impl IntoIterator<Item = Sexp>) -> Sexp {
        Sexp::List(items.into_iter().collect())
    }

    /// `(head args...)`, or just `head` when there are no arguments.
    pub fn app(head: impl Into<String>, args: impl IntoIterator<Item = Sexp>) -> Sexp {
        let args: Vec<Sexp> = args.into_iter().collect();
        if args.is_empty() {
            Sexp::Atom(head.into())
        } else {
            let mut v = Vec::with_capacity(args.len() + 1);
            v.push(Sexp::Atom(head.into()));
            v.extend(args);
            Sexp::List(v)
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(xs) => Some(xs),
            Sexp::Atom(_) => None,
        }
    }

    pub fn is_atom(&self, s: &str) -> bool {
        self.as_atom() == Some(s)
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{}", x)?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed s-expression at byte {pos}: {msg}")]
pub struct SexpError {
    pub pos: usize,
    pub msg: &'static str,
}

/// Parses every s-expression in `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut p = Parser { s: text.as_bytes(), i: 0 };
    let mut out = Vec::new();
    loop {
        p.skip_ws();
        if p.i >= p.s.len() {
            return Ok(out);
        }
        out.push(p.sexp()?);
    }
}

pub fn parse_one(text: &str) -> Result<Sexp, SexpError> {
    let mut v = parse_all(text)?;
    match v.len() {
        1 => Ok(v.pop().unwrap()),
        0 => Err(SexpError { pos: text.len(), msg: "empty input" }),
        _ => Err(SexpError { pos: 0, msg: "more than one expression" }),
    }
}

/// Length of the first complete s-expression in `text`, if there is one.
pub fn complete_prefix(text: &str) -> Option<usize> {
    let mut p = Parser { s: text.as_bytes(), i: 0 };
    p.skip_ws();
    if p.i >= p.s.len() {
        return None;
    }
    p.sexp().ok().map(|_| p.i)
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() {
            match self.s[self.i] {
                b';' => {
                    while self.i < self.s.len() && self.s[self.i] != b'\n' {
                        self.i += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.i += 1,
                _ => return,
            }
        }
    }

    fn err(&self, msg: &'static str) -> SexpError {
        SexpError { pos: self.i, msg }
    }

    fn sexp(&mut self) -> Result<Sexp, SexpError> {
        self.skip_ws();
        let start = self.i;
        match self.s.get(self.i) {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.i += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.s.get(self.i) {
                        None => return Err(self.err("unclosed list")),
                        Some(b')') => {
                            self.i += 1;
                            return Ok(Sexp::List(items));
                        }
                        _ => items.push(self.sexp()?),
                    }
                }
            }
            Some(b')') => Err(self.err("unexpected `)`")),
            Some(b'|') => {
                self.i += 1;
                while self.s.get(self.i).is_some_and(|&c| c != b'|') {
                    self.i += 1;
                }
                if self.i >= self.s.len() {
                    return Err(self.err("unclosed quoted symbol"));
                }
                self.i += 1;
                Ok(Sexp::Atom(self.text(start)))
            }
            Some(b'"') => {
                self.i += 1;
                loop {
                    match self.s.get(self.i) {
                        None => return Err(self.err("unclosed string")),
                        Some(b'"') if self.s.get(self.i + 1) == Some(&b'"') => self.i += 2,
                        Some(b'"') => {
                            self.i += 1;
                            return Ok(Sexp::Atom(self.text(start)));
                        }
                        _ => self.i += 1,
                    }
                }
            }
            Some(_) => {
                while self.s.get(self.i).is_some_and(|&c| !c.is_ascii_whitespace() && !matches!(c, b'(' | b')' | b';' | b'"' | b'|')) {
                    self.i += 1;
                }
                Ok(Sexp::Atom(self.text(start)))
            }
        }
    }

    fn text(&self, start: usize) -> String {
        String::from_utf8_lossy(&self.s[start..self.i]).into_owned()
    }
}
