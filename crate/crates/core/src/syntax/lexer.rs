use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_bigint::BigInt;

use super::ast::Span;
use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Int(BigInt),
    /// Lowercase (or `_`-prefixed) identifier, possibly qualified: `List.map`, `CX.l`.
    Ident(String),
    /// Capitalised identifier, possibly qualified: `Ordinal.Int`, `Cons_int`.
    UIdent(String),
    TyVar(String),
    Kw(Kw),
    Sym(Sym),
    /// `M.(`, a local open; the parenthesis is lexed separately.
    LocalOpen(String),
    /// `[@@name`, the opening of an attribute.
    Attr(String),
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kw {
    Type,
    Let,
    Rec,
    And,
    In,
    If,
    Then,
    Else,
    Match,
    With,
    Fun,
    Function,
    Theorem,
    Verify,
    Instance,
    Upto,
    Of,
    True,
    False,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sym {
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Semi,
    SemiSemi,
    Bar,
    Arrow,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    AndAnd,
    OrOr,
    Implies,
    ColonColon,
    Colon,
    Underscore,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn keyword(s: &str) -> Option<Kw> {
    Some(match s {
        "type" => Kw::Type,
        "let" => Kw::Let,
        "rec" => Kw::Rec,
        "and" => Kw::And,
        "in" => Kw::In,
        "if" => Kw::If,
        "then" => Kw::Then,
        "else" => Kw::Else,
        "match" => Kw::Match,
        "with" => Kw::With,
        "fun" => Kw::Fun,
        "function" => Kw::Function,
        "theorem" => Kw::Theorem,
        "verify" => Kw::Verify,
        "instance" => Kw::Instance,
        "upto" => Kw::Upto,
        "of" => Kw::Of,
        "true" => Kw::True,
        "false" => Kw::False,
        "not" => Kw::Not,
        _ => return None,
    })
}

pub fn is_keyword(s: &str) -> bool {
    keyword(s).is_some()
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'(' && bytes.get(i + 1) == Some(&b'*') {
            let start = i;
            let mut depth = 0usize;
            loop {
                if i >= bytes.len() {
                    return Err(ParseError::at(src, start, "unterminated comment"));
                }
                if bytes[i] == b'(' && bytes.get(i + 1) == Some(&b'*') {
                    depth += 1;
                    i += 2;
                } else if bytes[i] == b'*' && bytes.get(i + 1) == Some(&b')') {
                    depth -= 1;
                    i += 2;
                    if depth == 0 {
                        break;
                    }
                } else {
                    i += 1;
                }
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                return Err(ParseError::at(src, i, "malformed integer literal"));
            }
            let n = BigInt::parse_bytes(&bytes[start..i], 10)
                .ok_or_else(|| ParseError::at(src, start, "malformed integer literal"))?;
            toks.push(Token { tok: Tok::Int(n), span: Span::new(start, i) });
            continue;
        }
        if c == b'\'' {
            i += 1;
            if i >= bytes.len() || !(bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
                return Err(ParseError::at(src, start, "expected type variable name after '"));
            }
            while i < bytes.len() && is_ident_char(bytes[i]) {
                i += 1;
            }
            let name = src[start + 1..i].to_string();
            toks.push(Token { tok: Tok::TyVar(name), span: Span::new(start, i) });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && is_ident_char(bytes[i]) {
                i += 1;
            }
            // Qualified names: Upper.segment(.segment)*
            while bytes[start].is_ascii_uppercase()
                && i + 1 < bytes.len()
                && bytes[i] == b'.'
                && (bytes[i + 1].is_ascii_alphabetic() || bytes[i + 1] == b'_')
            {
                let seg = &src[start..i];
                let last = seg.rsplit('.').next().unwrap_or(seg);
                if !last.as_bytes()[0].is_ascii_uppercase() {
                    break;
                }
                i += 1;
                while i < bytes.len() && is_ident_char(bytes[i]) {
                    i += 1;
                }
            }
            let text = &src[start..i];
            let span = Span::new(start, i);
            let last = text.rsplit('.').next().unwrap_or(text);
            if last.as_bytes()[0].is_ascii_uppercase() && bytes.get(i) == Some(&b'.') && bytes.get(i + 1) == Some(&b'(') {
                i += 1;
                toks.push(Token { tok: Tok::LocalOpen(text.to_string()), span: Span::new(start, i) });
                continue;
            }
            let tok = if text == "_" {
                Tok::Sym(Sym::Underscore)
            } else if let Some(kw) = keyword(text) {
                Tok::Kw(kw)
            } else if last.as_bytes()[0].is_ascii_uppercase() {
                Tok::UIdent(text.to_string())
            } else {
                Tok::Ident(text.to_string())
            };
            toks.push(Token { tok, span });
            continue;
        }
        if src[i..].starts_with("[@@") {
            i += 3;
            let name_start = i;
            while i < bytes.len() && is_ident_char(bytes[i]) {
                i += 1;
            }
            if name_start == i {
                return Err(ParseError::at(src, start, "expected attribute name after [@@"));
            }
            toks.push(Token {
                tok: Tok::Attr(src[name_start..i].to_string()),
                span: Span::new(start, i),
            });
            continue;
        }
        const SYMS: &[(&str, Sym)] = &[
            ("==>", Sym::Implies),
            (";;", Sym::SemiSemi),
            ("->", Sym::Arrow),
            ("<>", Sym::Neq),
            ("<=", Sym::Le),
            (">=", Sym::Ge),
            ("&&", Sym::AndAnd),
            ("||", Sym::OrOr),
            ("::", Sym::ColonColon),
            ("(", Sym::LParen),
            (")", Sym::RParen),
            ("[", Sym::LBrack),
            ("]", Sym::RBrack),
            (",", Sym::Comma),
            (";", Sym::Semi),
            ("|", Sym::Bar),
            ("=", Sym::Eq),
            ("<", Sym::Lt),
            (">", Sym::Gt),
            ("+", Sym::Plus),
            ("-", Sym::Minus),
            ("*", Sym::Star),
            (":", Sym::Colon),
        ];
        let rest = &src[i..];
        match SYMS.iter().find(|(s, _)| rest.starts_with(s)) {
            Some((s, sym)) => {
                i += s.len();
                toks.push(Token { tok: Tok::Sym(*sym), span: Span::new(start, i) });
            }
            None => {
                let ch = rest.chars().next().unwrap_or('?');
                return Err(ParseError::at(src, start, &alloc::format!("unexpected character {:?}", ch)));
            }
        }
    }
    toks.push(Token { tok: Tok::Eof, span: Span::new(bytes.len(), bytes.len()) });
    Ok(toks)
}
