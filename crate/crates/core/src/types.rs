//! Types, schemes and substitutions.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::TyExpr;

pub const LIST: &str = "list";
pub const NIL: &str = "[]";
pub const CONS: &str = "::";
pub const ORDINAL: &str = "Ordinal.t";
pub const ORD_INT: &str = "Ordinal.Int";
pub const ORD_CONS: &str = "Ordinal.Cons";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Int,
    Bool,
    Var(u32),
    Adt(String, Vec<Type>),
    Tuple(Vec<Type>),
    Arrow(Box<Type>, Box<Type>),
}

pub type TySubst = BTreeMap<u32, Type>;

impl Type {
    pub fn list(elem: Type) -> Type {
        Type::Adt(LIST.into(), alloc::vec![elem])
    }

    pub fn adt(name: &str) -> Type {
        Type::Adt(name.into(), Vec::new())
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    /// `a1 -> ... -> an -> ret`
    pub fn arrows(params: impl IntoIterator<Item = Type, IntoIter: DoubleEndedIterator>, ret: Type) -> Type {
        params.into_iter().rev().fold(ret, |acc, p| Type::arrow(p, acc))
    }

    /// Splits off up to `n` argument types.
    pub fn uncurry(&self, n: usize) -> (Vec<Type>, Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while args.len() < n {
            match cur {
                Type::Arrow(a, b) => {
                    args.push((**a).clone());
                    cur = b;
                }
                _ => break,
            }
        }
        (args, cur.clone())
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Type::Arrow(..))
    }

    pub fn contains_arrow(&self) -> bool {
        match self {
            Type::Arrow(..) => true,
            Type::Adt(_, ts) | Type::Tuple(ts) => ts.iter().any(Type::contains_arrow),
            _ => false,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Type::Var(_) => false,
            Type::Adt(_, ts) | Type::Tuple(ts) => ts.iter().all(Type::is_ground),
            Type::Arrow(a, b) => a.is_ground() && b.is_ground(),
            _ => true,
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Type::Var(v) => {
                out.insert(*v);
            }
            Type::Adt(_, ts) | Type::Tuple(ts) => ts.iter().for_each(|t| t.free_vars(out)),
            Type::Arrow(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            _ => {}
        }
    }

    /// Type variables in order of first occurrence.
    pub fn vars_in_order(&self, out: &mut Vec<u32>) {
        match self {
            Type::Var(v) => {
                if !out.contains(v) {
                    out.push(*v);
                }
            }
            Type::Adt(_, ts) | Type::Tuple(ts) => ts.iter().for_each(|t| t.vars_in_order(out)),
            Type::Arrow(a, b) => {
                a.vars_in_order(out);
                b.vars_in_order(out);
            }
            _ => {}
        }
    }

    pub fn subst(&self, s: &TySubst) -> Type {
        match self {
            Type::Var(v) => match s.get(v) {
                Some(t) => t.clone(),
                None => self.clone(),
            },
            Type::Adt(n, ts) => Type::Adt(n.clone(), ts.iter().map(|t| t.subst(s)).collect()),
            Type::Tuple(ts) => Type::Tuple(ts.iter().map(|t| t.subst(s)).collect()),
            Type::Arrow(a, b) => Type::arrow(a.subst(s), b.subst(s)),
            _ => self.clone(),
        }
    }

    /// Replaces every remaining type variable by `int`.
    pub fn default_int(&self) -> Type {
        match self {
            Type::Var(_) => Type::Int,
            Type::Adt(n, ts) => Type::Adt(n.clone(), ts.iter().map(Type::default_int).collect()),
            Type::Tuple(ts) => Type::Tuple(ts.iter().map(Type::default_int).collect()),
            Type::Arrow(a, b) => Type::arrow(a.default_int(), b.default_int()),
            _ => self.clone(),
        }
    }

    pub fn to_ty_expr(&self) -> TyExpr {
        match self {
            Type::Int => TyExpr::Con("int".into(), Vec::new()),
            Type::Bool => TyExpr::Con("bool".into(), Vec::new()),
            Type::Var(v) => TyExpr::Var(var_name(*v)),
            Type::Adt(n, ts) => TyExpr::Con(n.clone(), ts.iter().map(Type::to_ty_expr).collect()),
            Type::Tuple(ts) => TyExpr::Tuple(ts.iter().map(Type::to_ty_expr).collect()),
            Type::Arrow(a, b) => TyExpr::Arrow(Box::new(a.to_ty_expr()), Box::new(b.to_ty_expr())),
        }
    }
}

fn var_name(v: u32) -> String {
    if v < 26 {
        format!("{}", (b'a' + v as u8) as char)
    } else {
        format!("t{}", v)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::pretty_type(&self.to_ty_expr()))
    }
}

/// `forall vars. ty`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    pub vars: Vec<u32>,
    pub ty: Type,
}

impl Scheme {
    pub fn mono(ty: Type) -> Self {
        Scheme { vars: Vec::new(), ty }
    }

    pub fn instantiate_with(&self, args: &[Type]) -> Type {
        let s: TySubst = self.vars.iter().copied().zip(args.iter().cloned()).collect();
        self.ty.subst(&s)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Rename quantified variables to 'a, 'b, ... in order.
        let s: TySubst = self.vars.iter().enumerate().map(|(i, v)| (*v, Type::Var(i as u32))).collect();
        let body = self.ty.subst(&s);
        if !self.vars.is_empty() {
            let names: Vec<String> = (0..self.vars.len()).map(|i| format!("'{}", var_name(i as u32))).collect();
            write!(f, "{}. ", names.join(" "))?;
        }
        write!(f, "{}", body)
    }
}
