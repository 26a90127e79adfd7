//! Rank-1 type inference and the admissibility criteria for types and
//! functions.

mod exhaustive;
mod infer;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use exhaustive::missing_case;
use infer::Infer;

use crate::syntax::{Annotation, Expr, ExprKind, FunDecl, FunGroup, Span, TheoremDecl, TyExpr, TypeDecl};
use crate::term::{Term, TermKind};
use crate::types::{Scheme, TySubst, Type};
use crate::world::{CtorInfo, TypeDef, World};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("type error: {message}")]
pub struct TypeError {
    pub message: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmissibilityKind {
    NotWellFounded,
    HigherOrderData,
    NonUniformRecursion,
    NonSpecializable,
    Redefinition,
}

impl fmt::Display for AdmissibilityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AdmissibilityKind::NotWellFounded => "not well-founded",
            AdmissibilityKind::HigherOrderData => "higher-order data",
            AdmissibilityKind::NonUniformRecursion => "non-uniform recursion",
            AdmissibilityKind::NonSpecializable => "not specializable",
            AdmissibilityKind::Redefinition => "redefinition",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{name}` rejected ({kind}): {explanation}")]
pub struct AdmissibilityError {
    pub kind: AdmissibilityKind,
    pub name: String,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Admissibility(#[from] AdmissibilityError),
}

fn adm(kind: AdmissibilityKind, name: &str, explanation: impl Into<String>) -> CheckError {
    CheckError::Admissibility(AdmissibilityError { kind, name: name.to_string(), explanation: explanation.into() })
}

fn type_err(span: Span, message: impl Into<String>) -> CheckError {
    CheckError::Type(TypeError { message: message.into(), span })
}

#[derive(Debug, Clone)]
pub struct TypedFun {
    pub name: String,
    pub params: Vec<(String, Type)>,
    pub ret: Type,
    pub scheme: Scheme,
    pub body: Term,
    pub decl: FunDecl,
}

#[derive(Debug, Clone)]
pub struct TypedGroup {
    pub is_rec: bool,
    pub funs: Vec<TypedFun>,
}

#[derive(Debug, Clone)]
pub struct TypedTheorem {
    pub name: String,
    pub params: Vec<(String, Type)>,
    pub body: Term,
    pub decl: TheoremDecl,
}

/// A closed boolean conjecture over typed free variables.
#[derive(Debug, Clone)]
pub struct TypedGoal {
    pub vars: Vec<(String, Type)>,
    pub body: Term,
}

// ------------------------------------------------------------------ types

/// Checks a type declaration and computes its constructor signatures.
pub fn check_type_decl(td: &TypeDecl, world: &World) -> Result<(TypeDef, Vec<CtorInfo>), CheckError> {
    let name = &td.name;
    if world.type_def(name).is_some() || name == "int" || name == "bool" {
        return Err(adm(AdmissibilityKind::Redefinition, name, "a type with this name already exists"));
    }
    let mut seen = BTreeSet::new();
    for c in &td.ctors {
        if !seen.insert(c.name.clone()) {
            return Err(type_err(td.span, format!("constructor `{}` is declared twice", c.name)));
        }
        if world.ctor(&c.name).is_some() {
            return Err(adm(AdmissibilityKind::Redefinition, &c.name, "a constructor with this name already exists"));
        }
    }
    let mut pseen = BTreeSet::new();
    for p in &td.params {
        if !pseen.insert(p.clone()) {
            return Err(type_err(td.span, format!("type parameter '{} is declared twice", p)));
        }
    }
    let self_args: Vec<Type> = (0..td.params.len() as u32).map(Type::Var).collect();
    let mut infos = Vec::new();
    for (i, c) in td.ctors.iter().enumerate() {
        let mut args = Vec::new();
        for a in &c.args {
            args.push(decl_type(a, td, world, &self_args)?);
        }
        if args.iter().any(Type::contains_arrow) {
            return Err(adm(
                AdmissibilityKind::HigherOrderData,
                name,
                format!("constructor `{}` has an argument of function type", c.name),
            ));
        }
        infos.push(CtorInfo { name: c.name.clone(), ty_name: name.clone(), index: i, n_params: td.params.len(), args });
    }
    if !infos.iter().any(|c| !c.is_recursive()) {
        return Err(adm(AdmissibilityKind::NotWellFounded, name, "every constructor mentions the type itself"));
    }
    let def = TypeDef {
        name: name.clone(),
        params: td.params.clone(),
        ctors: td.ctors.iter().map(|c| c.name.clone()).collect(),
        decl: Some(td.clone()),
    };
    Ok((def, infos))
}

fn decl_type(t: &TyExpr, td: &TypeDecl, world: &World, self_args: &[Type]) -> Result<Type, CheckError> {
    Ok(match t {
        TyExpr::Var(v) => match td.params.iter().position(|p| p == v) {
            Some(i) => Type::Var(i as u32),
            None => return Err(type_err(td.span, format!("unbound type variable '{}", v))),
        },
        TyExpr::Con(n, args) if args.is_empty() && n == "int" => Type::Int,
        TyExpr::Con(n, args) if args.is_empty() && n == "bool" => Type::Bool,
        TyExpr::Con(n, args) => {
            let mut ts = Vec::new();
            for a in args {
                ts.push(decl_type(a, td, world, self_args)?);
            }
            if n == &td.name {
                if ts.len() != self_args.len() {
                    return Err(type_err(td.span, format!("type `{}` expects {} argument(s)", n, self_args.len())));
                }
                if ts != self_args {
                    return Err(adm(
                        AdmissibilityKind::NonUniformRecursion,
                        n,
                        format!("recursive occurrence `{}` is not applied to the declared parameters", crate::syntax::pretty_type(t)),
                    ));
                }
            } else {
                match world.type_def(n) {
                    Some(d) if d.params.len() == ts.len() => {}
                    Some(d) => {
                        return Err(type_err(td.span, format!("type `{}` expects {} argument(s)", n, d.params.len())));
                    }
                    None => return Err(type_err(td.span, format!("unknown type `{}`", n))),
                }
            }
            Type::Adt(n.clone(), ts)
        }
        TyExpr::Tuple(ts) => {
            let mut out = Vec::new();
            for a in ts {
                out.push(decl_type(a, td, world, self_args)?);
            }
            Type::Tuple(out)
        }
        TyExpr::Arrow(a, b) => Type::arrow(decl_type(a, td, world, self_args)?, decl_type(b, td, world, self_args)?),
    })
}

// -------------------------------------------------------------- functions

fn check_params_distinct(names: &[&str], span: Span) -> Result<(), CheckError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(*n) {
            return Err(type_err(span, format!("parameter `{}` is declared twice", n)));
        }
    }
    Ok(())
}

fn check_annotations(f: &FunDecl) -> Result<(), CheckError> {
    let n = f.annotations.iter().filter(|a| matches!(a, Annotation::Adm(_) | Annotation::Measure(_))).count();
    if n > 1 {
        return Err(type_err(f.span, format!("`{}` has more than one measure annotation", f.name)));
    }
    for a in &f.annotations {
        if let Annotation::Adm(vs) = a {
            for v in vs {
                if !f.params.iter().any(|p| &p.name == v) {
                    return Err(type_err(f.span, format!("`[@@adm]` names `{}`, which is not a parameter of `{}`", v, f.name)));
                }
            }
        }
    }
    Ok(())
}

/// Infers types for a function group (one `let` or `let rec ... and ...`).
pub fn infer_group(g: &FunGroup, world: &World) -> Result<TypedGroup, CheckError> {
    let mut names = BTreeSet::new();
    for f in &g.defs {
        if world.value_defined(&f.name) || !names.insert(f.name.clone()) {
            return Err(adm(AdmissibilityKind::Redefinition, &f.name, "a function or theorem with this name already exists"));
        }
        check_params_distinct(&f.params.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(), f.span)?;
        check_annotations(f)?;
    }
    if g.is_rec && g.defs.len() > 2 {
        return Err(type_err(g.span, "recursive groups are limited to two functions"));
    }
    let funs = if g.is_rec {
        infer_rec_group(&g.defs, world)?
    } else {
        let mut out = Vec::new();
        for f in &g.defs {
            out.extend(infer_rec_group(core::slice::from_ref(f), world).map(|mut v| {
                v.truncate(1);
                v
            })?);
        }
        // non-recursive bodies must not refer to themselves
        for f in &out {
            if calls_any(&f.body, &[f.name.as_str()]) {
                return Err(type_err(f.decl.span, format!("`{}` refers to itself; use `let rec`", f.name)));
            }
        }
        out
    };
    let typed = TypedGroup { is_rec: g.is_rec, funs };
    check_fun_admissible(&typed)?;
    Ok(typed)
}

fn calls_any(t: &Term, names: &[&str]) -> bool {
    let mut refs = BTreeSet::new();
    t.global_refs(&mut refs);
    names.iter().any(|n| refs.contains(*n))
}

fn infer_rec_group(defs: &[FunDecl], world: &World) -> Result<Vec<TypedFun>, CheckError> {
    let mut inf = Infer::new(world);
    let mut sigs = Vec::new();
    for f in defs {
        let mut ps = Vec::new();
        for p in &f.params {
            ps.push((p.name.clone(), inf.param_type(p, f.span)?));
        }
        let ret = match &f.ret {
            Some(t) => inf.ty_expr(t, f.span)?,
            None => inf.fresh(),
        };
        let fty = Type::arrows(ps.iter().map(|(_, t)| t.clone()).collect::<Vec<_>>(), ret.clone());
        inf.group.insert(f.name.clone(), fty);
        sigs.push((ps, ret));
    }
    let mut bodies = Vec::new();
    for (f, (ps, ret)) in defs.iter().zip(&sigs) {
        let mark = inf.locals_len();
        for (x, t) in ps {
            inf.push_local(x, t.clone());
        }
        let body = inf.expr(&f.body)?;
        inf.unify(&body.ty, ret, f.body.span)?;
        inf.pop_locals(mark);
        bodies.push(body);
    }
    let group_vars: BTreeMap<String, Vec<u32>> = inf
        .group
        .iter()
        .map(|(n, t)| {
            let mut vs = Vec::new();
            inf.resolve(t).vars_in_order(&mut vs);
            (n.clone(), vs)
        })
        .collect();
    let mut out = Vec::new();
    for ((f, (ps, ret)), body) in defs.iter().zip(sigs).zip(bodies) {
        let fty = inf.resolve(&inf.group[&f.name]);
        let rename = renaming(&fty);
        let fin = Finalizer { inf: &inf, rename: &rename, group_vars: &group_vars };
        let params: Vec<(String, Type)> = ps.iter().map(|(x, t)| (x.clone(), fin.ty(t))).collect();
        let ret = fin.ty(&ret);
        let body = fin.term(&body);
        check_matches(&body, world, &f.name, f.span)?;
        let scheme = Scheme { vars: (0..rename.len() as u32).collect(), ty: fin.ty(&fty) };
        out.push(TypedFun { name: f.name.clone(), params, ret, scheme, body, decl: f.clone() });
    }
    Ok(out)
}

/// Maps the variables of `t`, in order of first occurrence, to `'a, 'b, ...`.
fn renaming(t: &Type) -> TySubst {
    let mut vs = Vec::new();
    t.vars_in_order(&mut vs);
    vs.into_iter().enumerate().map(|(i, v)| (v, Type::Var(i as u32))).collect()
}

struct Finalizer<'a, 'w> {
    inf: &'a Infer<'w>,
    rename: &'a TySubst,
    group_vars: &'a BTreeMap<String, Vec<u32>>,
}

impl Finalizer<'_, '_> {
    /// Renames scheme variables and defaults every other variable to `int`.
    fn ty(&self, t: &Type) -> Type {
        fn go(t: &Type, rename: &TySubst) -> Type {
            match t {
                Type::Var(v) => rename.get(v).cloned().unwrap_or(Type::Int),
                Type::Adt(n, ts) => Type::Adt(n.clone(), ts.iter().map(|t| go(t, rename)).collect()),
                Type::Tuple(ts) => Type::Tuple(ts.iter().map(|t| go(t, rename)).collect()),
                Type::Arrow(a, b) => Type::arrow(go(a, rename), go(b, rename)),
                _ => t.clone(),
            }
        }
        go(&self.inf.resolve(t), self.rename)
    }

    fn term(&self, t: &Term) -> Term {
        let kind = match &t.kind {
            TermKind::Fun(g, targs) => match self.group_vars.get(g) {
                Some(vs) => TermKind::Fun(g.clone(), vs.iter().map(|v| self.ty(&Type::Var(*v))).collect()),
                None => TermKind::Fun(g.clone(), targs.iter().map(|a| self.ty(a)).collect()),
            },
            TermKind::Lambda(ps, b) => {
                TermKind::Lambda(ps.iter().map(|(x, ty)| (x.clone(), self.ty(ty))).collect(), alloc::boxed::Box::new(self.term(b)))
            }
            _ => t.map_children(|c| self.term(c)).kind,
        };
        Term::new(kind, self.ty(&t.ty))
    }
}

fn check_matches(t: &Term, world: &World, owner: &str, span: Span) -> Result<(), CheckError> {
    if let TermKind::Match(s, bs) = &t.kind {
        let pats: Vec<_> = bs.iter().map(|(p, _)| p.clone()).collect();
        if let Some(w) = missing_case(world, &s.ty, &pats) {
            return Err(type_err(
                span,
                format!("non-exhaustive match in `{}`: `{}` is not covered", owner, crate::syntax::pretty_pattern(&w.to_pattern())),
            ));
        }
    }
    let mut res = Ok(());
    t.for_each_child(|c| {
        if res.is_ok() {
            res = check_matches(c, world, owner, span);
        }
    });
    res
}

// ------------------------------------------------------ theorems and goals

pub fn infer_theorem(t: &TheoremDecl, world: &World) -> Result<TypedTheorem, CheckError> {
    if world.value_defined(&t.name) {
        return Err(adm(AdmissibilityKind::Redefinition, &t.name, "a function or theorem with this name already exists"));
    }
    check_params_distinct(&t.params.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(), t.span)?;
    let mut inf = Infer::new(world);
    let mut ps = Vec::new();
    for p in &t.params {
        let ty = inf.param_type(p, t.span)?;
        inf.push_local(&p.name, ty.clone());
        ps.push((p.name.clone(), ty));
    }
    let body = inf.expr(&t.body)?;
    inf.unify(&body.ty, &Type::Bool, t.body.span).map_err(|_| type_err(t.span, format!("theorem `{}` must have type bool", t.name)))?;
    let sig = inf.resolve(&Type::Tuple(ps.iter().map(|(_, t)| t.clone()).collect()));
    let rename = renaming(&sig);
    let fin = Finalizer { inf: &inf, rename: &rename, group_vars: &BTreeMap::new() };
    let params = ps.iter().map(|(x, ty)| (x.clone(), fin.ty(ty))).collect();
    let body = fin.term(&body);
    check_matches(&body, world, &t.name, t.span)?;
    Ok(TypedTheorem { name: t.name.clone(), params, body, decl: t.clone() })
}

/// Types a `verify`/`instance` goal. A lambda's parameters become the goal's
/// variables; remaining type variables default to `int`.
pub fn infer_goal(goal: &Expr, world: &World) -> Result<TypedGoal, CheckError> {
    infer_goal_with(goal, world, &[])
}

/// Like [`infer_goal`], with extra typed names in scope.
pub fn infer_goal_with(goal: &Expr, world: &World, env: &[(String, Type)]) -> Result<TypedGoal, CheckError> {
    let mut inf = Infer::new(world);
    for (x, t) in env {
        inf.push_local(x, t.clone());
    }
    let (params, body) = match &goal.kind {
        ExprKind::Lambda(ps, body) => (ps.clone(), body.as_ref()),
        _ => (Vec::new(), goal),
    };
    check_params_distinct(&params.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(), goal.span)?;
    let mut vars = Vec::new();
    for p in &params {
        let ty = inf.param_type(p, goal.span)?;
        inf.push_local(&p.name, ty.clone());
        vars.push((p.name.clone(), ty));
    }
    let b = inf.expr(body)?;
    inf.unify(&b.ty, &Type::Bool, body.span).map_err(|_| type_err(goal.span, "a goal must be a boolean-valued function"))?;
    let rename = TySubst::new();
    let fin = Finalizer { inf: &inf, rename: &rename, group_vars: &BTreeMap::new() };
    let vars = vars.into_iter().map(|(x, t)| (x, fin.ty(&t))).collect();
    let body = fin.term(&b);
    check_matches(&body, world, "goal", goal.span)?;
    Ok(TypedGoal { vars, body })
}

/// Types a closed expression (type variables default to `int`).
pub fn infer_closed(e: &Expr, world: &World, env: &[(String, Type)]) -> Result<Term, CheckError> {
    let mut inf = Infer::new(world);
    for (x, t) in env {
        inf.push_local(x, t.clone());
    }
    let t = inf.expr(e)?;
    let rename = TySubst::new();
    let fin = Finalizer { inf: &inf, rename: &rename, group_vars: &BTreeMap::new() };
    let t = fin.term(&t);
    check_matches(&t, world, "expression", e.span)?;
    Ok(t)
}

// ----------------------------------------------------------- admissibility

/// Specializability: inside a recursion clique, every call to a clique member
/// passes the same functional arguments, each being one of the caller's own
/// functional parameters.
pub fn check_fun_admissible(g: &TypedGroup) -> Result<(), CheckError> {
    if !g.is_rec {
        return Ok(());
    }
    let members: BTreeMap<&str, &TypedFun> = g.funs.iter().map(|f| (f.name.as_str(), f)).collect();
    // (callee, position) -> first site seen
    let mut sites: BTreeMap<(String, usize), (Term, Term)> = BTreeMap::new();
    for f in &g.funs {
        let mut calls = Vec::new();
        collect_member_calls(&f.body, &members, &mut calls);
        for call in calls {
            let (callee, args) = call.as_call().map(|(c, a)| (c.to_string(), a.to_vec())).unwrap_or_default();
            let target = members[callee.as_str()];
            for (i, (_, pty)) in target.params.iter().enumerate() {
                if !pty.is_arrow() || i >= args.len() {
                    continue;
                }
                let arg = &args[i];
                let is_own_param = matches!(&arg.kind, TermKind::Var(x) if f.params.iter().any(|(p, t)| p == x && t.is_arrow()));
                if !is_own_param {
                    return Err(adm(
                        AdmissibilityKind::NonSpecializable,
                        &f.name,
                        format!(
                            "call `{}` passes `{}` as functional argument {} of `{}`; recursive calls must pass the caller's functional parameters unchanged",
                            call, arg, i + 1, callee
                        ),
                    ));
                }
                match sites.get(&(callee.clone(), i)) {
                    Some((site, prev)) if prev != arg => {
                        return Err(adm(
                            AdmissibilityKind::NonSpecializable,
                            &f.name,
                            format!("conflicting functional arguments to `{}`: `{}` and `{}`", callee, site, call),
                        ));
                    }
                    Some(_) => {}
                    None => {
                        sites.insert((callee.clone(), i), (call.clone(), arg.clone()));
                    }
                }
            }
        }
    }
    Ok(())
}

fn collect_member_calls(t: &Term, members: &BTreeMap<&str, &TypedFun>, out: &mut Vec<Term>) {
    if let Some((f, _)) = t.as_call() {
        if members.contains_key(f) {
            out.push(t.clone());
        }
    }
    t.for_each_child(|c| collect_member_calls(c, members, out));
}
