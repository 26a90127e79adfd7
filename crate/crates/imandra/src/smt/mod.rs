//! SMT-LIB client: s-expressions, solver sessions and the encoding of ground
//! programs.

pub mod encode;
pub mod session;
pub mod sexp;

pub use encode::{EncodeError, Encoder};
pub use session::{CheckResult, Session, SolverConfig, SolverError};
pub use sexp::Sexp;
