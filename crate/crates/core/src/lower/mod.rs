//! Lowering of goals to ground programs: anonymous functions are lifted to
//! top level, higher-order functions are copied per functional-argument
//! bundle with the arguments inlined, and polymorphic types and functions are
//! copied per instantiation.

mod program;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub use program::{ground_calls, GroundCtor, GroundFun, GroundGoal, GroundProgram, GroundType};

use crate::term::{Pat, Term, TermKind};
use crate::typecheck::TypedGoal;
use crate::types::{self, TySubst, Type};
use crate::world::World;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot lower: {0}")]
pub struct LowerError(pub String);

type Result<T> = core::result::Result<T, LowerError>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Head {
    Global(String, Vec<Type>),
    /// An already lowered lifted lambda.
    Lifted(String),
}

/// A functional value: a head applied to some leading arguments.
#[derive(Debug, Clone)]
struct FnVal {
    head: Head,
    captured: Vec<Arg>,
}

#[derive(Debug, Clone)]
enum Arg {
    Fo(Term),
    Fn(FnVal),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ArgKey {
    Fo(Type),
    Fn(Head, Vec<ArgKey>),
}

impl FnVal {
    fn key(&self) -> ArgKey {
        ArgKey::Fn(self.head.clone(), self.captured.iter().map(Arg::key).collect())
    }

    /// First-order values carried by the closure, in order.
    fn flat(&self, out: &mut Vec<Term>) {
        for a in &self.captured {
            match a {
                Arg::Fo(t) => out.push(t.clone()),
                Arg::Fn(f) => f.flat(out),
            }
        }
    }

    /// The same closure with every carried value replaced by a fresh parameter.
    fn abstracted(&self, base: &str, avoid: &mut BTreeSet<String>, params: &mut Vec<(String, Type)>) -> FnVal {
        let captured = self
            .captured
            .iter()
            .map(|a| match a {
                Arg::Fo(t) => {
                    let x = fresh(base, avoid);
                    params.push((x.clone(), t.ty.clone()));
                    Arg::Fo(Term::var(x, t.ty.clone()))
                }
                Arg::Fn(f) => Arg::Fn(f.abstracted(base, avoid, params)),
            })
            .collect();
        FnVal { head: self.head.clone(), captured }
    }
}

impl Arg {
    fn key(&self) -> ArgKey {
        match self {
            Arg::Fo(t) => ArgKey::Fo(t.ty.clone()),
            Arg::Fn(f) => f.key(),
        }
    }
}

fn fresh(base: &str, avoid: &mut BTreeSet<String>) -> String {
    let mut k = 0usize;
    loop {
        let cand = format!("{}_{}", base, k);
        if avoid.insert(cand.clone()) {
            return cand;
        }
        k += 1;
    }
}

type SpecKey = (String, Vec<Type>, Vec<Option<ArgKey>>);

struct Work {
    name: String,
    source: String,
    targs: Vec<Type>,
    fn_args: Vec<Option<FnVal>>,
}

/// Last dotted segment of a name.
fn base(name: &str) -> &str {
    name.rsplit('.').next().unwrap_or(name)
}

fn ctor_base(c: &str) -> String {
    match c {
        types::NIL => "Nil".into(),
        types::CONS => "Cons".into(),
        _ => c.replace('.', "_"),
    }
}

/// All variable names bound or used in `t`.
fn var_names(t: &Term, out: &mut BTreeSet<String>) {
    match &t.kind {
        TermKind::Var(x) | TermKind::Let(x, ..) => {
            out.insert(x.clone());
        }
        TermKind::Lambda(ps, _) => out.extend(ps.iter().map(|(x, _)| x.clone())),
        TermKind::Match(_, bs) => {
            for (p, _) in bs {
                let mut vs = Vec::new();
                p.bound_vars(&mut vs);
                out.extend(vs);
            }
        }
        _ => {}
    }
    t.for_each_child(|c| var_names(c, out));
}

/// Splits nested applications into a head and its full argument list.
fn spine(t: &Term) -> (&Term, Vec<Term>) {
    match &t.kind {
        TermKind::App(h, args) => {
            let (h, mut pre) = spine(h);
            pre.extend(args.iter().cloned());
            (h, pre)
        }
        _ => (t, Vec::new()),
    }
}

fn apply(head: Term, args: Vec<Term>) -> Term {
    if args.is_empty() {
        return head;
    }
    let (_, ret) = head.ty.uncurry(args.len());
    Term::new(TermKind::App(Box::new(head), args), ret)
}

/// Number of arguments a value of this type takes before it is first-order.
fn full_arity(ty: &Type) -> usize {
    ty.uncurry(usize::MAX).0.len()
}

pub struct Lowerer<'w> {
    world: &'w World,
    prog: GroundProgram,
    used: BTreeSet<String>,
    type_names: BTreeMap<Type, String>,
    ctor_names: BTreeMap<(String, Type), String>,
    specs: BTreeMap<SpecKey, String>,
    queue: VecDeque<Work>,
    counter: usize,
    temp: usize,
    env: BTreeMap<String, FnVal>,
    /// Name lifted lambdas are called after when not passed to a function.
    enclosing: String,
}

impl<'w> Lowerer<'w> {
    pub fn new(world: &'w World) -> Self {
        let mut used = BTreeSet::new();
        used.extend(world.functions().map(|f| f.name.clone()));
        used.extend(world.theorems().map(|t| t.name.clone()));
        used.extend(world.types().flat_map(|t| core::iter::once(t.name.clone()).chain(t.ctors.iter().cloned())));
        Lowerer {
            world,
            prog: GroundProgram::default(),
            used,
            type_names: BTreeMap::new(),
            ctor_names: BTreeMap::new(),
            specs: BTreeMap::new(),
            queue: VecDeque::new(),
            counter: 0,
            temp: 0,
            env: BTreeMap::new(),
            enclosing: String::from("goal"),
        }
    }

    fn unique(&mut self, name: String) -> String {
        if self.used.insert(name.clone()) {
            return name;
        }
        let mut k = 2usize;
        loop {
            let cand = format!("{}_{}", name, k);
            if self.used.insert(cand.clone()) {
                return cand;
            }
            k += 1;
        }
    }

    fn temp_name(&mut self, prefix: &str) -> String {
        self.temp += 1;
        format!("_{}{}", prefix, self.temp)
    }

    // ------------------------------------------------------------- types

    /// Ground copy of a source type.
    pub fn mono(&mut self, ty: &Type) -> Type {
        match ty {
            Type::Int | Type::Bool => ty.clone(),
            Type::Var(_) => Type::Int,
            Type::Tuple(ts) => Type::Tuple(ts.iter().map(|t| self.mono(t)).collect()),
            Type::Arrow(a, b) => Type::arrow(self.mono(a), self.mono(b)),
            Type::Adt(..) => Type::adt(&self.type_name(&ty.default_int())),
        }
    }

    fn mangle(&mut self, ty: &Type) -> String {
        match ty {
            Type::Int | Type::Var(_) => "int".into(),
            Type::Bool => "bool".into(),
            Type::Tuple(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| self.mangle(t)).collect();
                format!("{}_tuple", parts.join("_"))
            }
            Type::Arrow(a, b) => format!("{}_to_{}", self.mangle(a), self.mangle(b)),
            Type::Adt(..) => self.type_name(&ty.default_int()).replace('.', "_"),
        }
    }

    fn type_name(&mut self, ty: &Type) -> String {
        if let Some(n) = self.type_names.get(ty) {
            return n.clone();
        }
        let (src, args) = match ty {
            Type::Adt(n, args) => (n.clone(), args.clone()),
            _ => unreachable!("type_name on a non-datatype"),
        };
        let suffix = if args.is_empty() {
            None
        } else {
            let parts: Vec<String> = args.iter().map(|a| self.mangle(a)).collect();
            Some(parts.join("_"))
        };
        let name = match &suffix {
            None => src.clone(),
            Some(s) => self.unique(format!("{}_{}", s, base(&src))),
        };
        self.type_names.insert(ty.clone(), name.clone());
        let mut ctors = Vec::new();
        for (c, arg_tys) in self.world.ctors_of(ty) {
            let cname = match &suffix {
                None => c.clone(),
                Some(s) => self.unique(format!("{}_{}", ctor_base(&c), s)),
            };
            self.ctor_names.insert((c.clone(), ty.clone()), cname.clone());
            let args = arg_tys.iter().map(|t| self.mono(t)).collect();
            ctors.push(GroundCtor { name: cname, args, source: c });
        }
        self.prog.push_type(GroundType { name: name.clone(), ctors, source: ty.clone() });
        name
    }

    fn ctor_name(&mut self, c: &str, ty: &Type) -> String {
        let ty = ty.default_int();
        self.type_name(&ty);
        self.ctor_names.get(&(c.to_string(), ty)).cloned().unwrap_or_else(|| c.to_string())
    }

    // --------------------------------------------------------------- entry

    /// Lowers a goal and everything it depends on.
    pub fn goal(&mut self, vars: &[(String, Type)], body: &Term) -> Result<GroundGoal> {
        let vars: Vec<(String, Type)> = vars.iter().map(|(x, t)| (x.clone(), self.mono(t))).collect();
        self.env.clear();
        self.enclosing = String::from("goal");
        let body = self.lower(body)?;
        self.drain()?;
        Ok(GroundGoal { vars, body })
    }

    /// Ground name of a first-order source function at the given type
    /// arguments, lowering it on first use.
    pub fn function(&mut self, name: &str, targs: &[Type]) -> Result<String> {
        let mut targs: Vec<Type> = targs.iter().map(Type::default_int).collect();
        if let Some(f) = self.world.fun(name) {
            targs.resize(f.scheme.vars.len().max(targs.len()), Type::Int);
        }
        let (params, ret) = self.signature(name, &targs)?;
        if params.iter().any(|(_, t)| t.contains_arrow()) {
            return Err(LowerError(format!("`{}` is higher-order", name)));
        }
        let n = params.len() + full_arity(&ret);
        let key: SpecKey = (name.to_string(), targs.clone(), alloc::vec![None; n]);
        let ground = self.allocate(key, name, targs, alloc::vec![None; n]);
        self.drain()?;
        Ok(ground)
    }

    pub fn finish(mut self) -> GroundProgram {
        self.prog.compute_groups();
        self.prog
    }

    fn drain(&mut self) -> Result<()> {
        while let Some(w) = self.queue.pop_front() {
            self.lower_work(w)?;
        }
        Ok(())
    }

    // ------------------------------------------------------ specialization

    fn signature(&self, name: &str, targs: &[Type]) -> Result<(Vec<(String, Type)>, Type)> {
        let entry = self.world.fun(name).ok_or_else(|| LowerError(format!("unknown function `{}`", name)))?;
        let s: TySubst = entry.scheme.vars.iter().copied().zip(targs.iter().cloned()).collect();
        let params = entry.params.iter().map(|(x, t)| (x.clone(), t.subst(&s).default_int())).collect();
        Ok((params, entry.ret.subst(&s).default_int()))
    }

    fn allocate(&mut self, key: SpecKey, source: &str, targs: Vec<Type>, fn_args: Vec<Option<FnVal>>) -> String {
        if let Some(n) = self.specs.get(&key) {
            return n.clone();
        }
        let name = if fn_args.iter().any(Option::is_some) {
            let n = format!("{}{}", base(source), self.counter);
            self.counter += 1;
            self.unique(n)
        } else if targs.is_empty() {
            source.to_string()
        } else {
            let parts: Vec<String> = targs.iter().map(|t| self.mangle(t)).collect();
            self.unique(format!("{}_{}", base(source), parts.join("_")))
        };
        self.specs.insert(key, name.clone());
        self.prog.push_fun(GroundFun {
            name: name.clone(),
            params: Vec::new(),
            ret: Type::Int,
            body: Term::bool(false),
            source: source.to_string(),
            targs: targs.clone(),
            lifted: false,
            group: Vec::new(),
            is_rec: false,
        });
        self.queue.push_back(Work { name: name.clone(), source: source.to_string(), targs, fn_args });
        name
    }

    fn fill(&mut self, f: GroundFun) {
        let i = self.prog.funs.iter().position(|g| g.name == f.name).expect("allocated slot");
        self.prog.funs[i] = f;
    }

    fn lower_work(&mut self, w: Work) -> Result<()> {
        let entry = self.world.fun(&w.source).expect("queued function exists");
        let s: TySubst = entry.scheme.vars.iter().copied().zip(w.targs.iter().cloned()).collect();
        let mut body = entry.body.subst_types(&s);
        let mut src_params: Vec<(String, Type)> = entry.params.iter().map(|(x, t)| (x.clone(), t.subst(&s).default_int())).collect();
        let mut avoid = BTreeSet::new();
        var_names(&body, &mut avoid);
        avoid.extend(src_params.iter().map(|(x, _)| x.clone()));
        // eta-expand functions whose result is itself a function
        let ret_src = entry.ret.subst(&s).default_int();
        let (extra, ret) = ret_src.uncurry(usize::MAX);
        if !extra.is_empty() {
            let xs: Vec<Term> = extra.iter().map(|t| Term::var(fresh("x", &mut avoid), t.clone())).collect();
            for x in &xs {
                if let TermKind::Var(n) = &x.kind {
                    src_params.push((n.clone(), x.ty.clone()));
                }
            }
            body = apply(body, xs);
        }
        let saved_env = core::mem::take(&mut self.env);
        let saved_enclosing = core::mem::replace(&mut self.enclosing, base(&w.source).to_string());
        let mut params = Vec::new();
        for (i, (x, t)) in src_params.iter().enumerate() {
            match w.fn_args.get(i).and_then(|a| a.as_ref()) {
                Some(fv) => {
                    let abs = fv.abstracted(x, &mut avoid, &mut params);
                    self.env.insert(x.clone(), abs);
                }
                None => {
                    if t.contains_arrow() {
                        self.env = saved_env;
                        return Err(LowerError(format!("functional parameter `{}` of `{}` has no argument", x, w.source)));
                    }
                    let gt = self.mono(t);
                    params.push((x.clone(), gt));
                }
            }
        }
        let lowered = self.lower(&body);
        self.env = saved_env;
        self.enclosing = saved_enclosing;
        let body = lowered?;
        let ret = self.mono(&ret);
        self.fill(GroundFun {
            name: w.name,
            params,
            ret,
            body,
            source: w.source,
            targs: w.targs,
            lifted: false,
            group: Vec::new(),
            is_rec: false,
        });
        Ok(())
    }

    /// A saturated call of global `g`: `pre` are already resolved leading
    /// arguments, `rest` source terms.
    fn call_global(&mut self, g: &str, targs: &[Type], pre: Vec<Arg>, rest: &[Term]) -> Result<Term> {
        let targs: Vec<Type> = targs.iter().map(Type::default_int).collect();
        let (params, ret) = self.signature(g, &targs)?;
        let mut ptys: Vec<Type> = params.iter().map(|(_, t)| t.clone()).collect();
        let (extra, ret) = ret.uncurry(usize::MAX);
        ptys.extend(extra);
        if pre.len() + rest.len() != ptys.len() {
            return Err(LowerError(format!("`{}` is applied to {} of {} arguments", g, pre.len() + rest.len(), ptys.len())));
        }
        let saved = core::mem::replace(&mut self.enclosing, base(g).to_string());
        let n_pre = pre.len();
        let mut args: Vec<Option<Arg>> = pre.into_iter().map(Some).collect();
        for (i, a) in rest.iter().enumerate() {
            if ptys[n_pre + i].is_arrow() && a.ty.is_arrow() {
                let fv = self.resolve_fn(a);
                let fv = match fv {
                    Ok(f) => f,
                    Err(e) => {
                        self.enclosing = saved;
                        return Err(e);
                    }
                };
                args.push(Some(Arg::Fn(fv)));
            } else {
                args.push(None);
            }
        }
        self.enclosing = saved;
        let fn_args: Vec<Option<FnVal>> = args
            .iter()
            .map(|a| match a {
                Some(Arg::Fn(f)) => Some(f.clone()),
                _ => None,
            })
            .collect();
        let key: SpecKey = (g.to_string(), targs.clone(), fn_args.iter().map(|f| f.as_ref().map(FnVal::key)).collect());
        let name = self.allocate(key, g, targs, fn_args);
        let mut flat = Vec::new();
        for (i, a) in args.into_iter().enumerate() {
            match a {
                Some(Arg::Fo(t)) => flat.push(t),
                Some(Arg::Fn(f)) => f.flat(&mut flat),
                None => flat.push(self.lower(&rest[i - n_pre])?),
            }
        }
        let ret = self.mono(&ret);
        Ok(Term::call(name, flat, ret))
    }

    fn apply_fnval(&mut self, fv: &FnVal, rest: &[Term]) -> Result<Term> {
        match &fv.head {
            Head::Global(g, targs) => self.call_global(g, targs, fv.captured.clone(), rest),
            Head::Lifted(name) => {
                let f = self.prog.fun(name).expect("lifted lambda exists").clone();
                let mut flat = Vec::new();
                fv.clone().flat(&mut flat);
                for a in rest {
                    flat.push(self.lower(a)?);
                }
                Ok(Term::call(name.clone(), flat, f.ret))
            }
        }
    }

    /// Resolves an arrow-typed term to a functional value.
    fn resolve_fn(&mut self, t: &Term) -> Result<FnVal> {
        let (head, args) = spine(t);
        match &head.kind {
            TermKind::Var(x) if self.env.contains_key(x) => {
                let mut fv = self.env[x].clone();
                for a in &args {
                    let arg = self.resolve_arg(a)?;
                    fv.captured.push(arg);
                }
                Ok(fv)
            }
            TermKind::Fun(g, targs) => {
                let mut captured = Vec::new();
                for a in &args {
                    captured.push(self.resolve_arg(a)?);
                }
                Ok(FnVal { head: Head::Global(g.clone(), targs.iter().map(Type::default_int).collect()), captured })
            }
            TermKind::Lambda(ps, body) if args.is_empty() => self.lift(ps, body, &t.ty),
            _ => {
                // eta-expand and lift
                let (ptys, _) = t.ty.uncurry(usize::MAX);
                let mut avoid = BTreeSet::new();
                var_names(t, &mut avoid);
                let ps: Vec<(String, Type)> = ptys.iter().map(|ty| (fresh("y", &mut avoid), ty.clone())).collect();
                let xs: Vec<Term> = ps.iter().map(|(x, ty)| Term::var(x.clone(), ty.clone())).collect();
                let body = apply(t.clone(), xs);
                self.lift(&ps, &body, &t.ty)
            }
        }
    }

    fn resolve_arg(&mut self, a: &Term) -> Result<Arg> {
        if a.ty.is_arrow() {
            Ok(Arg::Fn(self.resolve_fn(a)?))
        } else {
            Ok(Arg::Fo(self.lower(a)?))
        }
    }

    fn lift(&mut self, ps: &[(String, Type)], body: &Term, ty: &Type) -> Result<FnVal> {
        if let Some((x, _)) = ps.iter().find(|(_, t)| t.contains_arrow()) {
            return Err(LowerError(format!("anonymous function with functional parameter `{}`", x)));
        }
        let mut ps = ps.to_vec();
        let mut body = body.clone();
        if full_arity(&body.ty) > 0 {
            let mut avoid = BTreeSet::new();
            var_names(&body, &mut avoid);
            avoid.extend(ps.iter().map(|(x, _)| x.clone()));
            let (more, _) = body.ty.uncurry(usize::MAX);
            let xs: Vec<Term> = more.iter().map(|t| Term::var(fresh("y", &mut avoid), t.clone())).collect();
            for x in &xs {
                if let TermKind::Var(n) = &x.kind {
                    ps.push((n.clone(), x.ty.clone()));
                }
            }
            body = apply(body, xs);
        }
        let lam = Term::new(TermKind::Lambda(ps.clone(), Box::new(body.clone())), ty.clone());
        let mut captured: Vec<(String, Type)> = Vec::new();
        for (x, t) in lam.free_vars_typed() {
            if let Some(fv) = self.env.get(&x) {
                let mut flat = Vec::new();
                fv.flat(&mut flat);
                for v in flat {
                    for (y, yt) in v.free_vars_typed() {
                        if !captured.iter().any(|(z, _)| *z == y) {
                            captured.push((y, yt));
                        }
                    }
                }
            } else if t.contains_arrow() {
                return Err(LowerError(format!("unresolved functional variable `{}`", x)));
            } else if !captured.iter().any(|(z, _)| *z == x) {
                let gt = self.mono(&t);
                captured.push((x, gt));
            }
        }
        let name = format!("{}_lambda{}", self.enclosing, self.counter);
        self.counter += 1;
        let name = self.unique(name);
        let slot = GroundFun {
            name: name.clone(),
            params: Vec::new(),
            ret: Type::Int,
            body: Term::bool(false),
            source: self.enclosing.clone(),
            targs: Vec::new(),
            lifted: true,
            group: Vec::new(),
            is_rec: false,
        };
        self.prog.push_fun(slot);
        let shadowed = self.shadow(ps.iter().map(|(x, _)| x.clone()));
        let lowered = self.lower(&body);
        self.unshadow(shadowed);
        let lowered = lowered?;
        let mut params = captured.clone();
        for (x, t) in &ps {
            let gt = self.mono(t);
            params.push((x.clone(), gt));
        }
        let ret = lowered.ty.clone();
        let source = self.enclosing.clone();
        self.fill(GroundFun { name: name.clone(), params, ret, body: lowered, source, targs: Vec::new(), lifted: true, group: Vec::new(), is_rec: false });
        Ok(FnVal { head: Head::Lifted(name), captured: captured.into_iter().map(|(x, t)| Arg::Fo(Term::var(x, t))).collect() })
    }

    fn shadow(&mut self, names: impl IntoIterator<Item = String>) -> Vec<(String, FnVal)> {
        let mut out = Vec::new();
        for n in names {
            if let Some(fv) = self.env.remove(&n) {
                out.push((n, fv));
            }
        }
        out
    }

    fn unshadow(&mut self, saved: Vec<(String, FnVal)>) {
        self.env.extend(saved);
    }

    // --------------------------------------------------------------- terms

    fn lower(&mut self, t: &Term) -> Result<Term> {
        if t.ty.contains_arrow() {
            return Err(LowerError(format!("functional value `{}` in first-order position", t)));
        }
        let ty = self.mono(&t.ty);
        let kind = match &t.kind {
            TermKind::Int(_) | TermKind::Bool(_) | TermKind::Var(_) => t.kind.clone(),
            TermKind::Fun(g, targs) => return self.call_global(g, targs, Vec::new(), &[]),
            TermKind::App(..) => return self.lower_app(t),
            TermKind::Lambda(..) => return Err(LowerError(format!("anonymous function `{}` in first-order position", t))),
            TermKind::Let(x, a, b) => {
                if a.ty.contains_arrow() {
                    let fv = self.resolve_fn(a)?;
                    let saved = self.env.insert(x.clone(), fv);
                    let r = self.lower(b);
                    match saved {
                        Some(old) => self.env.insert(x.clone(), old),
                        None => self.env.remove(x),
                    };
                    return r;
                }
                let a2 = self.lower(a)?;
                let sh = self.shadow([x.clone()]);
                let b2 = self.lower(b);
                self.unshadow(sh);
                TermKind::Let(x.clone(), Box::new(a2), Box::new(b2?))
            }
            TermKind::If(c, a, b) => TermKind::If(Box::new(self.lower(c)?), Box::new(self.lower(a)?), Box::new(self.lower(b)?)),
            TermKind::Match(s, bs) => {
                let s2 = self.lower(s)?;
                let mut arms = Vec::new();
                for (p, b) in bs {
                    let p2 = self.lower_pat(p, &s.ty);
                    let mut vs = Vec::new();
                    p.bound_vars(&mut vs);
                    let sh = self.shadow(vs);
                    let b2 = self.lower(b);
                    self.unshadow(sh);
                    arms.push((p2, b2?));
                }
                TermKind::Match(Box::new(s2), arms)
            }
            TermKind::Ctor(c, xs) => {
                let c2 = self.ctor_name(c, &t.ty);
                let xs2 = xs.iter().map(|x| self.lower(x)).collect::<Result<Vec<_>>>()?;
                TermKind::Ctor(c2, xs2)
            }
            TermKind::Tuple(xs) => TermKind::Tuple(xs.iter().map(|x| self.lower(x)).collect::<Result<Vec<_>>>()?),
            TermKind::Bin(op, a, b) => TermKind::Bin(*op, Box::new(self.lower(a)?), Box::new(self.lower(b)?)),
            TermKind::Not(a) => TermKind::Not(Box::new(self.lower(a)?)),
            TermKind::IsCtor(c, a) => TermKind::IsCtor(self.ctor_name(c, &a.ty), Box::new(self.lower(a)?)),
            TermKind::Select(c, i, a) => TermKind::Select(self.ctor_name(c, &a.ty), *i, Box::new(self.lower(a)?)),
            TermKind::Proj(i, a) => TermKind::Proj(*i, Box::new(self.lower(a)?)),
        };
        Ok(Term::new(kind, ty))
    }

    fn lower_pat(&mut self, p: &Pat, ty: &Type) -> Pat {
        match p {
            Pat::Ctor(c, ps) => {
                let tys = self.world.ctor_args_at(c, &ty.default_int());
                let c2 = self.ctor_name(c, ty);
                Pat::Ctor(c2, ps.iter().zip(tys.iter()).map(|(p, t)| self.lower_pat(p, t)).collect())
            }
            Pat::Tuple(ps) => {
                let tys = match ty {
                    Type::Tuple(ts) => ts.clone(),
                    _ => alloc::vec![Type::Int; ps.len()],
                };
                Pat::Tuple(ps.iter().zip(tys.iter()).map(|(p, t)| self.lower_pat(p, t)).collect())
            }
            _ => p.clone(),
        }
    }

    fn lower_app(&mut self, t: &Term) -> Result<Term> {
        let (head, args) = spine(t);
        match &head.kind {
            TermKind::Fun(g, targs) => self.call_global(g, targs, Vec::new(), &args),
            TermKind::Var(x) => match self.env.get(x).cloned() {
                Some(fv) => self.apply_fnval(&fv, &args),
                None => Err(LowerError(format!("unresolved functional variable `{}`", x))),
            },
            TermKind::Lambda(ps, body) if ps.len() <= args.len() => {
                // beta: first-order arguments are let-bound, functional ones resolved
                let (now, later) = args.split_at(ps.len());
                let mut lets = Vec::new();
                let mut saved = Vec::new();
                let mut subst = BTreeMap::new();
                for ((x, xt), a) in ps.iter().zip(now) {
                    let tmp = self.temp_name("a");
                    subst.insert(x.clone(), Term::var(tmp.clone(), xt.clone()));
                    if xt.is_arrow() {
                        let fv = self.resolve_fn(a)?;
                        saved.push((tmp.clone(), self.env.insert(tmp, fv)));
                    } else {
                        lets.push((tmp, a.clone()));
                    }
                }
                let inner = apply(body.subst(&subst), later.to_vec());
                let mut term = inner;
                for (x, a) in lets.into_iter().rev() {
                    let ty = term.ty.clone();
                    term = Term::new(TermKind::Let(x, Box::new(a), Box::new(term)), ty);
                }
                let r = self.lower(&term);
                for (n, old) in saved {
                    match old {
                        Some(o) => self.env.insert(n, o),
                        None => self.env.remove(&n),
                    };
                }
                r
            }
            _ => {
                // push the arguments into the branches of a conditional head
                let mut lets = Vec::new();
                let mut saved = Vec::new();
                let mut vars = Vec::new();
                for a in &args {
                    let tmp = self.temp_name("a");
                    vars.push(Term::var(tmp.clone(), a.ty.clone()));
                    if a.ty.is_arrow() {
                        let fv = self.resolve_fn(a)?;
                        saved.push((tmp.clone(), self.env.insert(tmp, fv)));
                    } else {
                        lets.push((tmp, a.clone()));
                    }
                }
                let pushed = push_args(head, &vars)?;
                let mut term = pushed;
                for (x, a) in lets.into_iter().rev() {
                    let ty = term.ty.clone();
                    term = Term::new(TermKind::Let(x, Box::new(a), Box::new(term)), ty);
                }
                let r = self.lower(&term);
                for (n, old) in saved {
                    match old {
                        Some(o) => self.env.insert(n, o),
                        None => self.env.remove(&n),
                    };
                }
                r
            }
        }
    }
}

fn push_args(head: &Term, args: &[Term]) -> Result<Term> {
    let (_, ret) = head.ty.uncurry(args.len());
    let kind = match &head.kind {
        TermKind::If(c, a, b) => TermKind::If(c.clone(), Box::new(apply((**a).clone(), args.to_vec())), Box::new(apply((**b).clone(), args.to_vec()))),
        TermKind::Let(x, a, b) => TermKind::Let(x.clone(), a.clone(), Box::new(apply((**b).clone(), args.to_vec()))),
        TermKind::Match(s, bs) => TermKind::Match(s.clone(), bs.iter().map(|(p, b)| (p.clone(), apply(b.clone(), args.to_vec()))).collect()),
        TermKind::Lambda(..) => return Ok(apply(head.clone(), args.to_vec())),
        _ => return Err(LowerError(format!("cannot apply `{}`", head))),
    };
    Ok(Term::new(kind, ret))
}

/// Lowers a typed goal together with everything it depends on.
pub fn lower_goal(world: &World, goal: &TypedGoal) -> Result<(GroundProgram, GroundGoal)> {
    let mut l = Lowerer::new(world);
    let g = l.goal(&goal.vars, &goal.body)?;
    Ok((l.finish(), g))
}

#[cfg(test)]
mod tests;
