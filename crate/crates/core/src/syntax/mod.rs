//! Lexing, parsing and pretty-printing of IML-mini.
//!
//! The grammar is ML-like: `type`, `let [rec] ... [and ...]`, `theorem`,
//! `verify [upto N]` and `instance [upto N]` at top level, attributes written
//! `[@@adm m, n]`, `[@@measure e]`, `[@@auto]`, `[@@rewrite]`.

mod alpha;
mod ast;
mod lexer;
mod parser;
mod pretty;

pub use alpha::{alpha_eq_decl, alpha_eq_expr};
pub use ast::*;
pub use lexer::is_keyword;
pub use parser::{parse_expr, parse_module, parse_type};
pub use pretty::{pretty, pretty_expr, pretty_module, pretty_pattern, pretty_type};

use alloc::string::{String, ToString};

/// A parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(src: &str, offset: usize, message: &str) -> Self {
        let offset = offset.min(src.len());
        let before = &src.as_bytes()[..offset];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&b| b == b'\n').map(|i| i + 1).unwrap_or(0);
        let col = src[line_start..]
            .char_indices()
            .take_while(|(i, _)| line_start + i < offset)
            .count()
            + 1;
        ParseError { offset, line, col, message: message.to_string() }
    }

    /// True when the input ended before the construct was complete. The REPL
    /// uses this to keep reading continuation lines.
    pub fn is_incomplete(&self) -> bool {
        self.message.ends_with("found end of input") || self.message.starts_with("unterminated")
    }
}

#[cfg(test)]
mod tests;
