//! Pattern-match exhaustiveness via usefulness of a wildcard row.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;

use crate::term::Pat;
use crate::types::Type;
use crate::world::World;

/// Returns a value pattern of type `ty` that no pattern in `pats` matches.
pub fn missing_case(world: &World, ty: &Type, pats: &[Pat]) -> Option<Pat> {
    let rows: Vec<Vec<Pat>> = pats.iter().map(|p| vec![p.clone()]).collect();
    witness(world, &rows, &[ty.clone()]).map(|mut w| w.remove(0))
}

#[derive(Clone, PartialEq)]
enum Head {
    Ctor(alloc::string::String, usize),
    Tuple(usize),
    Int(BigInt),
    Bool(bool),
}

fn head_of(p: &Pat) -> Option<Head> {
    match p {
        Pat::Ctor(c, ps) => Some(Head::Ctor(c.clone(), ps.len())),
        Pat::Tuple(ps) => Some(Head::Tuple(ps.len())),
        Pat::Int(n) => Some(Head::Int(n.clone())),
        Pat::Bool(b) => Some(Head::Bool(*b)),
        Pat::Var(_) | Pat::Wild => None,
    }
}

fn specialize(rows: &[Vec<Pat>], h: &Head, arity: usize) -> Vec<Vec<Pat>> {
    let mut out = Vec::new();
    for r in rows {
        let rest = &r[1..];
        let mut row: Vec<Pat> = match (&r[0], h) {
            (Pat::Var(_) | Pat::Wild, _) => vec![Pat::Wild; arity],
            (Pat::Ctor(c, ps), Head::Ctor(d, _)) if c == d => ps.clone(),
            (Pat::Tuple(ps), Head::Tuple(_)) => ps.clone(),
            (Pat::Int(n), Head::Int(m)) if n == m => vec![],
            (Pat::Bool(a), Head::Bool(b)) if a == b => vec![],
            _ => continue,
        };
        row.extend_from_slice(rest);
        out.push(row);
    }
    out
}

fn witness(world: &World, rows: &[Vec<Pat>], tys: &[Type]) -> Option<Vec<Pat>> {
    if tys.is_empty() {
        return if rows.is_empty() { Some(Vec::new()) } else { None };
    }
    let ty = &tys[0];
    let heads: Vec<Head> = rows.iter().filter_map(|r| head_of(&r[0])).collect();
    // Complete signatures: every constructor of the type, with argument types.
    let signature: Option<Vec<(Head, Vec<Type>)>> = match ty {
        Type::Tuple(ts) => Some(vec![(Head::Tuple(ts.len()), ts.clone())]),
        Type::Bool => Some(vec![(Head::Bool(true), vec![]), (Head::Bool(false), vec![])]),
        Type::Adt(..) => Some(
            world
                .ctors_of(ty)
                .into_iter()
                .map(|(c, args)| (Head::Ctor(c, args.len()), args))
                .collect(),
        ),
        _ => None,
    };
    let complete = match &signature {
        Some(sig) => !sig.is_empty() && sig.iter().all(|(h, _)| heads.contains(h)),
        None => false,
    };
    if complete {
        for (h, args) in signature.unwrap() {
            let spec = specialize(rows, &h, args.len());
            let mut sub_tys = args.clone();
            sub_tys.extend_from_slice(&tys[1..]);
            if let Some(w) = witness(world, &spec, &sub_tys) {
                let (fields, rest) = w.split_at(args.len());
                let p = match h {
                    Head::Ctor(c, _) => Pat::Ctor(c, fields.to_vec()),
                    Head::Tuple(_) => Pat::Tuple(fields.to_vec()),
                    Head::Bool(b) => Pat::Bool(b),
                    Head::Int(n) => Pat::Int(n),
                };
                let mut out = vec![p];
                out.extend_from_slice(rest);
                return Some(out);
            }
        }
        return None;
    }
    let default: Vec<Vec<Pat>> = rows.iter().filter(|r| head_of(&r[0]).is_none()).map(|r| r[1..].to_vec()).collect();
    let w = witness(world, &default, &tys[1..])?;
    let missing = match (&signature, ty) {
        (Some(sig), _) => match sig.iter().find(|(h, _)| !heads.contains(h)) {
            Some((Head::Ctor(c, n), _)) => Pat::Ctor(c.clone(), vec![Pat::Wild; *n]),
            Some((Head::Bool(b), _)) => Pat::Bool(*b),
            _ => Pat::Wild,
        },
        (None, Type::Int) => {
            let mut n = BigInt::from(0);
            while heads.contains(&Head::Int(n.clone())) {
                n += 1;
            }
            Pat::Int(n)
        }
        _ => Pat::Wild,
    };
    let mut out = vec![missing];
    out.extend(w);
    Some(out)
}
