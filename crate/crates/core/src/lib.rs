//! Core of mini-imandra: the IML-mini language, its type system, ordinals,
//! the definitional principle, lowering to ground first-order programs,
//! function templates and the evaluator.
//!
//! This crate is `no_std` and only needs `alloc`; process IO, the SMT
//! client and the prover loop live in the `mini-imandra` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod defn;
pub mod eval;
pub mod lower;
pub mod ordinal;
pub mod prelude;
pub mod syntax;
pub mod template;
pub mod term;
pub mod typecheck;
pub mod types;
pub mod world;
