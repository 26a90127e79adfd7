//! Function templates: every call in a function body together with the path
//! condition under which it is evaluated.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lower::GroundProgram;
use crate::term::{self, Term, TermKind};
use crate::types::Type;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TemplateEntry {
    /// The call `g(args)` over the host function's parameters.
    pub call: Term,
    /// Conjuncts of the path; empty means `true`.
    pub path: Vec<Term>,
}

impl TemplateEntry {
    pub fn callee(&self) -> &str {
        self.call.as_call().map(|(f, _)| f).unwrap_or("")
    }

    pub fn args(&self) -> &[Term] {
        self.call.as_call().map(|(_, a)| a).unwrap_or(&[])
    }

    pub fn path_term(&self) -> Term {
        Term::and_all(self.path.clone())
    }
}

impl fmt::Display for TemplateEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self.args().iter().map(|a| alloc::format!("{}", a)).collect();
        write!(f, "({}, ({}), {})", self.callee(), args.join(", "), self.path_term())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Template {
    pub params: Vec<(String, Type)>,
    pub entries: Vec<TemplateEntry>,
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let es: Vec<String> = self.entries.iter().map(|e| alloc::format!("{}", e)).collect();
        write!(f, "{{ {} }}", es.join(", "))
    }
}

/// Body of `f` with short-circuit operators turned into conditionals and
/// pattern matches into constructor tests and selectors.
pub fn normalized_body(body: &Term, prog: &GroundProgram) -> Term {
    let ctor_args = |c: &str, _: &Type| prog.ctor(c).map(|(_, _, k)| k.args.clone()).unwrap_or_default();
    term::flatten(&term::short_circuit_to_if(body), &ctor_args)
}

/// Template of a body over `params`; `is_fun` says which names are defined
/// functions.
pub fn template_of(params: &[(String, Type)], body: &Term, is_fun: &dyn Fn(&str) -> bool) -> Template {
    let mut entries = Vec::new();
    collect(body, is_fun, &mut Vec::new(), &mut entries);
    let mut seen = alloc::collections::BTreeSet::new();
    entries.retain(|e: &TemplateEntry| seen.insert(e.clone()));
    Template { params: params.to_vec(), entries }
}

fn collect(t: &Term, is_fun: &dyn Fn(&str) -> bool, path: &mut Vec<Term>, out: &mut Vec<TemplateEntry>) {
    match &t.kind {
        TermKind::If(c, a, b) => {
            collect(c, is_fun, path, out);
            path.push((**c).clone());
            collect(a, is_fun, path, out);
            path.pop();
            path.push(Term::not((**c).clone()));
            collect(b, is_fun, path, out);
            path.pop();
        }
        _ => {
            if let Some((f, args)) = t.as_call() {
                if is_fun(f) {
                    out.push(TemplateEntry { call: t.clone(), path: path.clone() });
                }
                for a in args {
                    collect(a, is_fun, path, out);
                }
                return;
            }
            t.for_each_child(|c| collect(c, is_fun, path, out));
        }
    }
}

/// Template of a ground program function.
pub fn template_for(prog: &GroundProgram, name: &str) -> Option<Template> {
    let f = prog.fun(name)?;
    let body = normalized_body(&f.body, prog);
    Some(template_of(&f.params, &body, &|g| prog.fun(g).is_some()))
}

/// `(call, path)` pairs with the formals replaced by `actuals`.
pub fn instantiate(tpl: &Template, actuals: &[Term]) -> Vec<(Term, Vec<Term>)> {
    assert_eq!(tpl.params.len(), actuals.len(), "template arity");
    let s: BTreeMap<String, Term> = tpl.params.iter().map(|(x, _)| x.clone()).zip(actuals.iter().cloned()).collect();
    tpl.entries.iter().map(|e| (e.call.subst(&s), e.path.iter().map(|p| p.subst(&s)).collect())).collect()
}

#[cfg(test)]
mod tests;
