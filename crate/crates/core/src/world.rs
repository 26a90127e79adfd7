//! The logical world: everything admitted so far.

use alloc::collections::BTreeMap;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;

use crate::defn::{MeasureSpec, RecCall};
use crate::syntax::{FunDecl, TheoremDecl, TypeDecl};
use crate::term::Term;
use crate::types::{Scheme, TySubst, Type};

#[derive(Debug, Clone)]
pub struct TypeDef {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<String>,
    pub decl: Option<TypeDecl>,
}

#[derive(Debug, Clone)]
pub struct CtorInfo {
    pub name: String,
    pub ty_name: String,
    pub index: usize,
    pub n_params: usize,
    /// Argument types; `Type::Var(i)` stands for the i-th type parameter.
    pub args: Vec<Type>,
}

impl CtorInfo {
    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn arg_types(&self, targs: &[Type]) -> Vec<Type> {
        let s: TySubst = targs.iter().cloned().enumerate().map(|(i, t)| (i as u32, t)).collect();
        self.args.iter().map(|t| t.subst(&s)).collect()
    }

    pub fn result_type(&self, targs: &[Type]) -> Type {
        Type::Adt(self.ty_name.clone(), targs.to_vec())
    }

    pub fn is_recursive(&self) -> bool {
        fn mentions(t: &Type, name: &str) -> bool {
            match t {
                Type::Adt(n, ts) => n == name || ts.iter().any(|t| mentions(t, name)),
                Type::Tuple(ts) => ts.iter().any(|t| mentions(t, name)),
                Type::Arrow(a, b) => mentions(a, name) || mentions(b, name),
                _ => false,
            }
        }
        self.args.iter().any(|t| mentions(t, &self.ty_name))
    }
}

/// How termination of an admitted function was established.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    NonRecursive,
    /// Structural recursion on the given parameter of each group member.
    Structural(Vec<usize>),
    /// Number of termination conditions discharged by the prover.
    Proved(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunEntry {
    pub name: String,
    pub params: Vec<(String, Type)>,
    pub ret: Type,
    pub scheme: Scheme,
    pub body: Term,
    /// Members of the recursion clique, in declaration order.
    pub group: Vec<String>,
    pub is_rec: bool,
    pub measure: Option<MeasureSpec>,
    pub rec_calls: Vec<RecCall>,
    pub certificate: Certificate,
    pub decl: Option<FunDecl>,
}

impl FunEntry {
    pub fn param_types(&self) -> Vec<Type> {
        self.params.iter().map(|(_, t)| t.clone()).collect()
    }

    /// Indices of parameters with function type.
    pub fn functional_params(&self) -> Vec<usize> {
        self.params.iter().enumerate().filter(|(_, (_, t))| t.is_arrow()).map(|(i, _)| i).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremEntry {
    pub name: String,
    pub params: Vec<(String, Type)>,
    pub body: Term,
    pub rewrite: bool,
    pub auto: bool,
    pub proved: bool,
    pub decl: Option<TheoremDecl>,
}

/// An immutable snapshot; admission returns an extended copy.
#[derive(Debug, Clone, Default)]
pub struct World {
    pub(crate) types: BTreeMap<String, Rc<TypeDef>>,
    pub(crate) ctors: BTreeMap<String, Rc<CtorInfo>>,
    pub(crate) funs: BTreeMap<String, Rc<FunEntry>>,
    pub(crate) theorems: BTreeMap<String, Rc<TheoremEntry>>,
    pub(crate) rules: Vec<String>,
    pub(crate) order: Vec<String>,
}

impl World {
    /// An empty world with no prelude. Most callers want [`World::new`].
    pub fn empty() -> World {
        World::default()
    }

    pub fn type_def(&self, name: &str) -> Option<&TypeDef> {
        self.types.get(name).map(|t| t.as_ref())
    }

    pub fn ctor(&self, name: &str) -> Option<&CtorInfo> {
        self.ctors.get(name).map(|c| c.as_ref())
    }

    pub fn fun(&self, name: &str) -> Option<&FunEntry> {
        self.funs.get(name).map(|f| f.as_ref())
    }

    pub fn theorem(&self, name: &str) -> Option<&TheoremEntry> {
        self.theorems.get(name).map(|t| t.as_ref())
    }

    pub fn functions(&self) -> impl Iterator<Item = &FunEntry> {
        self.funs.values().map(|f| f.as_ref())
    }

    pub fn theorems(&self) -> impl Iterator<Item = &TheoremEntry> {
        self.theorems.values().map(|t| t.as_ref())
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeDef> {
        self.types.values().map(|t| t.as_ref())
    }

    /// Installed rewrite rules, in admission order.
    pub fn rules(&self) -> impl Iterator<Item = &TheoremEntry> {
        self.rules.iter().filter_map(|n| self.theorem(n))
    }

    /// Names in admission order (types, functions and theorems).
    pub fn admission_order(&self) -> &[String] {
        &self.order
    }

    pub fn value_defined(&self, name: &str) -> bool {
        self.funs.contains_key(name) || self.theorems.contains_key(name)
    }

    /// Argument types of constructor `c` when building a value of type `ty`.
    pub fn ctor_args_at(&self, c: &str, ty: &Type) -> Vec<Type> {
        match (self.ctor(c), ty) {
            (Some(info), Type::Adt(_, targs)) => info.arg_types(targs),
            (Some(info), _) => info.args.clone(),
            _ => Vec::new(),
        }
    }

    /// Constructors of an ADT type with their argument types at `ty`.
    pub fn ctors_of(&self, ty: &Type) -> Vec<(String, Vec<Type>)> {
        match ty {
            Type::Adt(n, targs) => match self.type_def(n) {
                Some(def) => def
                    .ctors
                    .iter()
                    .map(|c| (c.clone(), self.ctor(c).map(|i| i.arg_types(targs)).unwrap_or_default()))
                    .collect(),
                None => Vec::new(),
            },
            _ => Vec::new(),
        }
    }

    pub(crate) fn insert_type(&mut self, def: TypeDef, ctors: Vec<CtorInfo>) {
        self.order.push(def.name.clone());
        for c in ctors {
            self.ctors.insert(c.name.clone(), Rc::new(c));
        }
        self.types.insert(def.name.clone(), Rc::new(def));
    }

    pub(crate) fn insert_fun(&mut self, f: FunEntry) {
        self.order.push(f.name.clone());
        self.funs.insert(f.name.clone(), Rc::new(f));
    }

    pub(crate) fn insert_theorem(&mut self, t: TheoremEntry) {
        self.order.push(t.name.clone());
        if t.rewrite && t.proved {
            self.rules.push(t.name.clone());
        }
        self.theorems.insert(t.name.clone(), Rc::new(t));
    }
}
