//! Ground, monomorphic, first-order programs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::term::{Term, TermKind};
use crate::types::Type;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundCtor {
    pub name: String,
    pub args: Vec<Type>,
    /// Source constructor this one was copied from.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundType {
    pub name: String,
    pub ctors: Vec<GroundCtor>,
    /// Source instance, e.g. `int list` for `int_list`.
    pub source: Type,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundFun {
    pub name: String,
    pub params: Vec<(String, Type)>,
    pub ret: Type,
    pub body: Term,
    /// Source function, or the function a lifted lambda was named after.
    pub source: String,
    pub targs: Vec<Type>,
    /// True for lifted anonymous functions.
    pub lifted: bool,
    /// Strongly connected component of the call graph containing this function.
    pub group: Vec<String>,
    pub is_rec: bool,
}

impl GroundFun {
    pub fn param_types(&self) -> Vec<Type> {
        self.params.iter().map(|(_, t)| t.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundGoal {
    pub vars: Vec<(String, Type)>,
    pub body: Term,
}

impl fmt::Display for GroundGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vars.iter().map(|(x, t)| format!("({}:{})", x, t)).collect();
        write!(f, "fun {} -> {}", vs.join(" "), self.body)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub types: Vec<GroundType>,
    pub funs: Vec<GroundFun>,
    ctor_index: BTreeMap<String, (usize, usize)>,
    type_index: BTreeMap<String, usize>,
    fun_index: BTreeMap<String, usize>,
}

impl GroundProgram {
    pub(crate) fn push_type(&mut self, t: GroundType) {
        let ti = self.types.len();
        for (ci, c) in t.ctors.iter().enumerate() {
            self.ctor_index.insert(c.name.clone(), (ti, ci));
        }
        self.type_index.insert(t.name.clone(), ti);
        self.types.push(t);
    }

    pub(crate) fn push_fun(&mut self, f: GroundFun) -> usize {
        let i = self.funs.len();
        self.fun_index.insert(f.name.clone(), i);
        self.funs.push(f);
        i
    }

    pub fn fun(&self, name: &str) -> Option<&GroundFun> {
        self.fun_index.get(name).map(|&i| &self.funs[i])
    }

    pub fn type_def(&self, name: &str) -> Option<&GroundType> {
        self.type_index.get(name).map(|&i| &self.types[i])
    }

    /// The type declaring `ctor`, the constructor's position in it, and the constructor.
    pub fn ctor(&self, name: &str) -> Option<(&GroundType, usize, &GroundCtor)> {
        self.ctor_index.get(name).map(|&(t, c)| (&self.types[t], c, &self.types[t].ctors[c]))
    }

    pub fn ctors_of(&self, ty: &Type) -> &[GroundCtor] {
        match ty {
            Type::Adt(n, _) => self.type_def(n).map(|t| t.ctors.as_slice()).unwrap_or(&[]),
            _ => &[],
        }
    }

    /// Recomputes call-graph components and recursion flags.
    pub(crate) fn compute_groups(&mut self) {
        let n = self.funs.len();
        let mut edges: Vec<Vec<usize>> = Vec::with_capacity(n);
        for f in &self.funs {
            let mut refs = alloc::collections::BTreeSet::new();
            f.body.global_refs(&mut refs);
            edges.push(refs.iter().filter_map(|r| self.fun_index.get(r).copied()).collect());
        }
        let comps = tarjan(&edges);
        for comp in comps {
            let mut members: Vec<usize> = comp.clone();
            members.sort_unstable();
            let names: Vec<String> = members.iter().map(|&i| self.funs[i].name.clone()).collect();
            let is_rec = members.len() > 1 || edges[members[0]].contains(&members[0]);
            for &i in &members {
                self.funs[i].group = names.clone();
                self.funs[i].is_rec = is_rec;
            }
        }
    }
}

fn tarjan(edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct St<'a> {
        edges: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut St<'_>, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on[v] = true;
        for &w in &s.edges[v] {
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = s.stack.pop() {
                s.on[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            s.out.push(comp);
        }
    }
    let n = edges.len();
    let mut s = St { edges, index: alloc::vec![None; n], low: alloc::vec![0; n], on: alloc::vec![false; n], stack: Vec::new(), next: 0, out: Vec::new() };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.types {
            let cs: Vec<String> = t
                .ctors
                .iter()
                .map(|c| {
                    if c.args.is_empty() {
                        c.name.clone()
                    } else {
                        let args: Vec<String> = c.args.iter().map(|a| format!("{}", a)).collect();
                        format!("{} of {}", c.name, args.join(" * "))
                    }
                })
                .collect();
            writeln!(f, "type {} = {}", t.name, cs.join(" | "))?;
        }
        for g in &self.funs {
            let rec = if g.is_rec { "rec " } else { "" };
            let ps: Vec<String> = g.params.iter().map(|(x, t)| format!("({}:{})", x, t)).collect();
            writeln!(f, "let {}{} {} = {}", rec, g.name, ps.join(" "), g.body)?;
        }
        Ok(())
    }
}

/// Saturated calls of program functions in `t`.
pub fn ground_calls(t: &Term, p: &GroundProgram, out: &mut Vec<Term>) {
    if let Some((f, _)) = t.as_call() {
        if p.fun(f).is_some() {
            out.push(t.clone());
        }
    }
    if let TermKind::App(_, args) = &t.kind {
        args.iter().for_each(|a| ground_calls(a, p, out));
    } else {
        t.for_each_child(|c| ground_calls(c, p, out));
    }
}
