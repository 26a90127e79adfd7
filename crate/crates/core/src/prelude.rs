//! Built-in types and the `List` / `Ordinal` function libraries.

use alloc::string::String;
use alloc::vec;

use crate::defn::{self, NoProver};
use crate::syntax::{parse_module, Decl};
use crate::types::{self, Type};
use crate::world::{CtorInfo, TypeDef, World};

pub const PRELUDE: &str = r#"
type Ordinal.t = Ordinal.Int of int | Ordinal.Cons of Ordinal.t * int * Ordinal.t

let rec List.length l = match l with
  | [] -> 0
  | _ :: t -> 1 + List.length t

let rec List.append x y = match x with
  | [] -> y
  | h :: t -> h :: List.append t y

let rec List.rev l = match l with
  | [] -> []
  | h :: t -> List.append (List.rev t) [h]

let rec List.map f l = match l with
  | [] -> []
  | h :: t -> f h :: List.map f t

let rec List.fold_left f acc l = match l with
  | [] -> acc
  | h :: t -> List.fold_left f (f acc h) t

let Ordinal.of_int n = if n < 0 then Ordinal.Int 0 else Ordinal.Int n

let rec Ordinal.lt x y = match x, y with
  | Ordinal.Int a, Ordinal.Int b -> a < b
  | Ordinal.Int _, Ordinal.Cons _ -> true
  | Ordinal.Cons _, Ordinal.Int _ -> false
  | Ordinal.Cons (a1, x1, t1), Ordinal.Cons (a2, x2, t2) ->
    Ordinal.lt a1 a2 || (a1 = a2 && (x1 < x2 || (x1 = x2 && Ordinal.lt t1 t2)))

let rec Ordinal.plus x y = match x, y with
  | Ordinal.Int a, Ordinal.Int b -> Ordinal.Int (a + b)
  | Ordinal.Int _, Ordinal.Cons _ -> y
  | Ordinal.Cons (a, c, t), Ordinal.Int _ -> Ordinal.Cons (a, c, Ordinal.plus t y)
  | Ordinal.Cons (a1, c1, t1), Ordinal.Cons (a2, c2, t2) ->
    if Ordinal.lt a1 a2 then y
    else if a1 = a2 then Ordinal.Cons (a1, c1 + c2, t2)
    else Ordinal.Cons (a1, c1, Ordinal.plus t1 y)

let rec Ordinal.shift x = match x with
  | Ordinal.Int n -> if n <= 0 then Ordinal.Int 0 else Ordinal.Cons (Ordinal.Int 1, n, Ordinal.Int 0)
  | Ordinal.Cons (e, c, r) -> Ordinal.Cons (Ordinal.plus e (Ordinal.Int 1), c, Ordinal.shift r)

let Ordinal.pair x y = Ordinal.plus (Ordinal.shift x) y
"#;

/// Names of the prelude functions, in definition order.
pub const PRELUDE_FUNCTIONS: &[&str] = &[
    "List.length",
    "List.append",
    "List.rev",
    "List.map",
    "List.fold_left",
    "Ordinal.of_int",
    "Ordinal.lt",
    "Ordinal.plus",
    "Ordinal.shift",
    "Ordinal.pair",
];

fn builtin_list(w: &mut World) {
    let a = Type::Var(0);
    w.insert_type(
        TypeDef { name: String::from(types::LIST), params: vec![String::from("a")], ctors: vec![types::NIL.into(), types::CONS.into()], decl: None },
        vec![
            CtorInfo { name: types::NIL.into(), ty_name: types::LIST.into(), index: 0, n_params: 1, args: vec![] },
            CtorInfo { name: types::CONS.into(), ty_name: types::LIST.into(), index: 1, n_params: 1, args: vec![a.clone(), Type::list(a)] },
        ],
    );
}

impl World {
    /// The initial world: `list`, `Ordinal.t` and the prelude functions.
    pub fn new() -> World {
        let mut w = World::empty();
        builtin_list(&mut w);
        let m = parse_module(PRELUDE).expect("prelude parses");
        for d in &m.decls {
            w = match d {
                Decl::Type(td) => defn::admit_type(td, &w).expect("prelude type admits"),
                Decl::Fun(g) => defn::admit_group(g, &w, &mut NoProver).expect("prelude function admits").0,
                _ => unreachable!("prelude holds only definitions"),
            };
        }
        w
    }
}
