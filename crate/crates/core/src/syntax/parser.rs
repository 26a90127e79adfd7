use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;

use super::ast::*;
use super::lexer::{tokenize, Kw, Sym, Tok, Token};
use super::ParseError;

pub fn parse_module(text: &str) -> Result<SourceModule, ParseError> {
    let mut p = Parser::new(text)?;
    let mut decls = Vec::new();
    loop {
        while p.eat_sym(Sym::SemiSemi) {}
        if p.at_eof() {
            break;
        }
        decls.push(p.decl()?);
    }
    Ok(SourceModule { decls })
}

/// Parses a single expression spanning the whole input.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    while p.eat_sym(Sym::SemiSemi) {}
    if !p.at_eof() {
        return Err(p.error("end of input"));
    }
    Ok(e)
}

pub fn parse_type(text: &str) -> Result<TyExpr, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    if !p.at_eof() {
        return Err(p.error("end of input"));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    pos: usize,
    fresh: usize,
}

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_CMP: u8 = 4;
const PREC_CONS: u8 = 5;
const PREC_ADD: u8 = 6;
const PREC_MUL: u8 = 7;

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        Ok(Parser { src, toks: tokenize(src)?, pos: 0, fresh: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Tok::Eof => "end of input".to_string(),
            _ => {
                let s = self.span();
                format!("`{}`", &self.src[s.start..s.end])
            }
        };
        ParseError::at(self.src, self.span().start, &format!("expected {}, found {}", expected, found))
    }

    fn eat_sym(&mut self, s: Sym) -> bool {
        if *self.peek() == Tok::Sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Kw) -> bool {
        if *self.peek() == Tok::Kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: Sym, what: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn expect_kw(&mut self, k: Kw, what: &str) -> Result<(), ParseError> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    fn fresh_name(&mut self) -> String {
        let n = format!("_arg{}", self.fresh);
        self.fresh += 1;
        n
    }

    // ---------------------------------------------------------------- decls

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Kw(Kw::Type) => {
                self.bump();
                self.type_decl(start).map(Decl::Type)
            }
            Tok::Kw(Kw::Let) => {
                self.bump();
                let is_rec = self.eat_kw(Kw::Rec);
                let mut defs = vec![self.fun_decl()?];
                while self.eat_kw(Kw::And) {
                    defs.push(self.fun_decl()?);
                }
                Ok(Decl::Fun(FunGroup { is_rec, defs, span: Span::new(start, self.prev_end()) }))
            }
            Tok::Kw(Kw::Theorem) => {
                self.bump();
                let name = self.ident("theorem name")?;
                let params = self.params()?;
                if self.eat_sym(Sym::Colon) {
                    // Result type of a theorem is always bool; the ascription is checked by inference.
                    let t = self.ty()?;
                    if t != TyExpr::Con("bool".into(), vec![]) {
                        return Err(ParseError::at(self.src, start, "theorem result type must be bool"));
                    }
                }
                self.expect_sym(Sym::Eq, "`=`")?;
                let body = self.expr()?;
                let annotations = self.annotations()?;
                Ok(Decl::Theorem(TheoremDecl {
                    name,
                    params,
                    body,
                    annotations,
                    span: Span::new(start, self.prev_end()),
                }))
            }
            Tok::Kw(k @ (Kw::Verify | Kw::Instance)) => {
                self.bump();
                let kind = if k == Kw::Verify { DirectiveKind::Verify } else { DirectiveKind::Instance };
                let mut bound = None;
                if self.eat_kw(Kw::Upto) {
                    match self.peek().clone() {
                        Tok::Int(n) => {
                            self.bump();
                            let b: u64 = u64::try_from(&n)
                                .map_err(|_| ParseError::at(self.src, start, "bound out of range"))?;
                            bound = Some(b);
                        }
                        _ => return Err(self.error("integer bound after `upto`")),
                    }
                }
                let goal = self.expr()?;
                let annotations = self.annotations()?;
                Ok(Decl::Directive(Directive {
                    kind,
                    goal,
                    bound,
                    annotations,
                    span: Span::new(start, self.prev_end()),
                }))
            }
            _ => Err(self.error("a declaration (`type`, `let`, `theorem`, `verify` or `instance`)")),
        }
    }

    fn type_decl(&mut self, start: usize) -> Result<TypeDecl, ParseError> {
        let mut params = Vec::new();
        match self.peek().clone() {
            Tok::TyVar(v) => {
                self.bump();
                params.push(v);
            }
            Tok::Sym(Sym::LParen) => {
                self.bump();
                loop {
                    match self.peek().clone() {
                        Tok::TyVar(v) => {
                            self.bump();
                            params.push(v);
                        }
                        _ => return Err(self.error("type variable")),
                    }
                    if !self.eat_sym(Sym::Comma) {
                        break;
                    }
                }
                self.expect_sym(Sym::RParen, "`)`")?;
            }
            _ => {}
        }
        let name = self.ident("type name")?;
        self.expect_sym(Sym::Eq, "`=`")?;
        self.eat_sym(Sym::Bar);
        let mut ctors = Vec::new();
        loop {
            let cname = match self.peek().clone() {
                Tok::UIdent(c) => {
                    self.bump();
                    c
                }
                _ => return Err(self.error("constructor name")),
            };
            let mut args = Vec::new();
            if self.eat_kw(Kw::Of) {
                args.push(self.ty_app()?);
                while self.eat_sym(Sym::Star) {
                    args.push(self.ty_app()?);
                }
            }
            ctors.push(CtorDecl { name: cname, args });
            if !self.eat_sym(Sym::Bar) {
                break;
            }
        }
        Ok(TypeDecl { name, params, ctors, span: Span::new(start, self.prev_end()) })
    }

    fn fun_decl(&mut self) -> Result<FunDecl, ParseError> {
        let start = self.span().start;
        let name = self.ident("function name")?;
        let mut params = self.params()?;
        let ret = if self.eat_sym(Sym::Colon) { Some(self.ty()?) } else { None };
        self.expect_sym(Sym::Eq, "`=`")?;
        let mut body = self.expr()?;
        if ret.is_none() {
            // `let f = fun x -> ...` and `let f = function ...` define f x.
            while let ExprKind::Lambda(ps, inner) = body.kind {
                params.extend(ps);
                body = *inner;
            }
        }
        let annotations = self.annotations()?;
        Ok(FunDecl { name, params, ret, body, annotations, span: Span::new(start, self.prev_end()) })
    }

    fn params(&mut self) -> Result<Vec<Param>, ParseError> {
        let mut params = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(n) => {
                    self.bump();
                    params.push(Param::untyped(n));
                }
                Tok::Sym(Sym::Underscore) => {
                    self.bump();
                    let n = self.fresh_name();
                    params.push(Param::untyped(n));
                }
                Tok::Sym(Sym::LParen) if matches!(self.peek_at(1), Tok::Ident(_)) && *self.peek_at(2) == Tok::Sym(Sym::Colon) => {
                    self.bump();
                    let n = self.ident("parameter name")?;
                    self.expect_sym(Sym::Colon, "`:`")?;
                    let t = self.ty()?;
                    self.expect_sym(Sym::RParen, "`)`")?;
                    params.push(Param { name: n, ty: Some(t) });
                }
                _ => break,
            }
        }
        Ok(params)
    }

    fn annotations(&mut self) -> Result<Vec<Annotation>, ParseError> {
        let mut out = Vec::new();
        while let Tok::Attr(name) = self.peek().clone() {
            let at = self.span().start;
            self.bump();
            let ann = match name.as_str() {
                "adm" => {
                    let mut vars = vec![self.ident("parameter name")?];
                    while self.eat_sym(Sym::Comma) {
                        vars.push(self.ident("parameter name")?);
                    }
                    Annotation::Adm(vars)
                }
                "measure" => Annotation::Measure(self.expr()?),
                "auto" => Annotation::Auto,
                "rewrite" => Annotation::Rewrite,
                other => {
                    return Err(ParseError::at(self.src, at, &format!("unknown attribute `{}`", other)));
                }
            };
            self.expect_sym(Sym::RBrack, "`]` closing the attribute")?;
            out.push(ann);
        }
        Ok(out)
    }

    // ---------------------------------------------------------------- types

    fn ty(&mut self) -> Result<TyExpr, ParseError> {
        let lhs = self.ty_tuple()?;
        if self.eat_sym(Sym::Arrow) {
            let rhs = self.ty()?;
            return Ok(TyExpr::Arrow(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn ty_tuple(&mut self) -> Result<TyExpr, ParseError> {
        let first = self.ty_app()?;
        if *self.peek() != Tok::Sym(Sym::Star) {
            return Ok(first);
        }
        let mut elems = vec![first];
        while self.eat_sym(Sym::Star) {
            elems.push(self.ty_app()?);
        }
        Ok(TyExpr::Tuple(elems))
    }

    fn ty_app(&mut self) -> Result<TyExpr, ParseError> {
        let mut args: Vec<TyExpr> = match self.peek().clone() {
            Tok::TyVar(v) => {
                self.bump();
                vec![TyExpr::Var(v)]
            }
            Tok::Ident(n) => {
                self.bump();
                vec![TyExpr::Con(n, vec![])]
            }
            Tok::Sym(Sym::LParen) => {
                self.bump();
                let mut items = vec![self.ty()?];
                while self.eat_sym(Sym::Comma) {
                    items.push(self.ty()?);
                }
                self.expect_sym(Sym::RParen, "`)`")?;
                if items.len() > 1 && !matches!(self.peek(), Tok::Ident(_)) {
                    return Err(self.error("type constructor after a parenthesised argument list"));
                }
                items
            }
            _ => return Err(self.error("a type")),
        };
        while let Tok::Ident(n) = self.peek().clone() {
            self.bump();
            args = vec![TyExpr::Con(n, core::mem::take(&mut args))];
        }
        debug_assert_eq!(args.len(), 1);
        Ok(args.pop().unwrap())
    }

    // ---------------------------------------------------------------- exprs

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        self.binary(PREC_IMPLIES)
    }

    fn prefix_form(&mut self) -> Result<Option<Expr>, ParseError> {
        let start = self.span().start;
        let e = match self.peek().clone() {
            Tok::Kw(Kw::Fun) => {
                self.bump();
                let params = self.params()?;
                if params.is_empty() {
                    return Err(self.error("parameter after `fun`"));
                }
                self.expect_sym(Sym::Arrow, "`->`")?;
                let body = self.expr()?;
                ExprKind::Lambda(params, Box::new(body))
            }
            Tok::Kw(Kw::Function) => {
                self.bump();
                let x = self.fresh_name();
                let branches = self.branches()?;
                let scrut = Expr::new(ExprKind::Var(x.clone()), Span::new(start, start));
                let m = Expr::new(ExprKind::Match(Box::new(scrut), branches), Span::new(start, self.prev_end()));
                ExprKind::Lambda(vec![Param::untyped(x)], Box::new(m))
            }
            Tok::Kw(Kw::Let) => {
                self.bump();
                let name = self.ident("name after `let`")?;
                let params = self.params()?;
                self.expect_sym(Sym::Eq, "`=`")?;
                let bound_start = self.span().start;
                let mut bound = self.expr()?;
                if !params.is_empty() {
                    bound = Expr::new(ExprKind::Lambda(params, Box::new(bound)), Span::new(bound_start, self.prev_end()));
                }
                self.expect_kw(Kw::In, "`in`")?;
                let body = self.expr()?;
                ExprKind::Let(name, Box::new(bound), Box::new(body))
            }
            Tok::Kw(Kw::If) => {
                self.bump();
                let c = self.expr()?;
                self.expect_kw(Kw::Then, "`then`")?;
                let t = self.expr()?;
                self.expect_kw(Kw::Else, "`else`")?;
                let e = self.expr()?;
                ExprKind::If(Box::new(c), Box::new(t), Box::new(e))
            }
            Tok::Kw(Kw::Match) => {
                self.bump();
                let first = self.expr()?;
                let scrut = if *self.peek() == Tok::Sym(Sym::Comma) {
                    let mut items = vec![first];
                    while self.eat_sym(Sym::Comma) {
                        items.push(self.expr()?);
                    }
                    let sp = items[0].span.join(items[items.len() - 1].span);
                    Expr::new(ExprKind::Tuple(items), sp)
                } else {
                    first
                };
                self.expect_kw(Kw::With, "`with`")?;
                let branches = self.branches()?;
                ExprKind::Match(Box::new(scrut), branches)
            }
            _ => return Ok(None),
        };
        Ok(Some(Expr::new(e, Span::new(start, self.prev_end()))))
    }

    fn branches(&mut self) -> Result<Vec<Branch>, ParseError> {
        self.eat_sym(Sym::Bar);
        let mut out = Vec::new();
        loop {
            let pat = self.pattern()?;
            self.expect_sym(Sym::Arrow, "`->`")?;
            let body = self.expr()?;
            out.push(Branch { pat, body });
            if !self.eat_sym(Sym::Bar) {
                break;
            }
        }
        Ok(out)
    }

    fn binop_of(&self) -> Option<(u8, Sym)> {
        match self.peek() {
            Tok::Sym(s) => {
                let p = match s {
                    Sym::Implies => PREC_IMPLIES,
                    Sym::OrOr => PREC_OR,
                    Sym::AndAnd => PREC_AND,
                    Sym::Eq | Sym::Neq | Sym::Lt | Sym::Le | Sym::Gt | Sym::Ge => PREC_CMP,
                    Sym::ColonColon => PREC_CONS,
                    Sym::Plus | Sym::Minus => PREC_ADD,
                    Sym::Star => PREC_MUL,
                    _ => return None,
                };
                Some((p, *s))
            }
            _ => None,
        }
    }

    fn binary(&mut self, min: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some((prec, sym)) = self.binop_of() {
            if prec < min {
                break;
            }
            self.bump();
            let right_assoc = matches!(sym, Sym::Implies | Sym::OrOr | Sym::AndAnd | Sym::ColonColon);
            let next = if right_assoc { prec } else { prec + 1 };
            let rhs = self.binary(next)?;
            let span = lhs.span.join(rhs.span);
            let bin = |op| ExprKind::BinOp(op, Box::new(lhs.clone()), Box::new(rhs.clone()));
            let kind = match sym {
                Sym::Implies => {
                    let neg = Expr::new(ExprKind::Not(Box::new(lhs.clone())), lhs.span);
                    ExprKind::BinOp(BinOp::Or, Box::new(neg), Box::new(rhs.clone()))
                }
                Sym::OrOr => bin(BinOp::Or),
                Sym::AndAnd => bin(BinOp::And),
                Sym::Eq => bin(BinOp::Eq),
                Sym::Neq => ExprKind::Not(Box::new(Expr::new(bin(BinOp::Eq), span))),
                Sym::Lt => bin(BinOp::Lt),
                Sym::Le => bin(BinOp::Le),
                Sym::Gt => bin(BinOp::Gt),
                Sym::Ge => bin(BinOp::Ge),
                Sym::ColonColon => ExprKind::Construct("::".into(), vec![lhs.clone(), rhs.clone()]),
                Sym::Plus => bin(BinOp::Add),
                Sym::Minus => bin(BinOp::Sub),
                Sym::Star => bin(BinOp::Mul),
                _ => unreachable!(),
            };
            lhs = Expr::new(kind, span);
            if prec == PREC_CMP && self.binop_of().map(|(p, _)| p) == Some(PREC_CMP) {
                return Err(self.error("parentheses around chained comparison"));
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let start = self.span().start;
        if let Some(e) = self.prefix_form()? {
            return Ok(e);
        }
        if self.eat_kw(Kw::Not) {
            let arg = self.unary()?;
            let sp = Span::new(start, arg.span.end);
            return Ok(Expr::new(ExprKind::Not(Box::new(arg)), sp));
        }
        if *self.peek() == Tok::Sym(Sym::Minus) {
            self.bump();
            if let Tok::Int(n) = self.peek().clone() {
                self.bump();
                return Ok(Expr::new(ExprKind::Int(-n), Span::new(start, self.prev_end())));
            }
            let arg = self.unary()?;
            let sp = Span::new(start, arg.span.end);
            let zero = Expr::new(ExprKind::Int(BigInt::from(0)), Span::new(start, start));
            return Ok(Expr::new(ExprKind::BinOp(BinOp::Sub, Box::new(zero), Box::new(arg)), sp));
        }
        self.application()
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(_)
                | Tok::Ident(_)
                | Tok::UIdent(_)
                | Tok::LocalOpen(_)
                | Tok::Kw(Kw::True)
                | Tok::Kw(Kw::False)
                | Tok::Sym(Sym::LParen)
                | Tok::Sym(Sym::LBrack)
        )
    }

    fn application(&mut self) -> Result<Expr, ParseError> {
        let start = self.span().start;
        if let Tok::UIdent(c) = self.peek().clone() {
            self.bump();
            let args = if *self.peek() == Tok::Sym(Sym::LParen) && !self.paren_is_operator() {
                self.bump();
                let mut items = vec![self.expr()?];
                while self.eat_sym(Sym::Comma) {
                    items.push(self.expr()?);
                }
                self.expect_sym(Sym::RParen, "`)`")?;
                items
            } else if self.starts_atom() {
                vec![self.atom()?]
            } else {
                vec![]
            };
            return Ok(Expr::new(ExprKind::Construct(c, args), Span::new(start, self.prev_end())));
        }
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom()?);
        }
        if args.is_empty() {
            return Ok(head);
        }
        let sp = Span::new(start, self.prev_end());
        Ok(Expr::new(ExprKind::App(Box::new(head), args), sp))
    }

    fn paren_is_operator(&self) -> bool {
        matches!(self.peek_at(1), Tok::Sym(s) if is_operator_section(*s)) && *self.peek_at(2) == Tok::Sym(Sym::RParen)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let start = self.span().start;
        let kind = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                ExprKind::Int(n)
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                ExprKind::Bool(true)
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                ExprKind::Bool(false)
            }
            Tok::Ident(n) => {
                self.bump();
                ExprKind::Var(n)
            }
            Tok::UIdent(c) => {
                self.bump();
                ExprKind::Construct(c, vec![])
            }
            Tok::LocalOpen(m) => {
                self.bump();
                self.expect_sym(Sym::LParen, "`(`")?;
                let inner = self.expr()?;
                self.expect_sym(Sym::RParen, "`)`")?;
                let mut bound = Vec::new();
                qualify(&inner, &m, &mut bound).kind
            }
            Tok::Sym(Sym::LParen) => {
                if self.paren_is_operator() {
                    self.bump();
                    let sym = match self.bump().tok {
                        Tok::Sym(s) => s,
                        _ => unreachable!(),
                    };
                    self.bump();
                    return Ok(self.operator_section(sym, Span::new(start, self.prev_end())));
                }
                self.bump();
                let first = self.expr()?;
                if self.eat_sym(Sym::RParen) {
                    return Ok(Expr::new(first.kind, Span::new(start, self.prev_end())));
                }
                let mut items = vec![first];
                while self.eat_sym(Sym::Comma) {
                    items.push(self.expr()?);
                }
                self.expect_sym(Sym::RParen, "`,` or `)`")?;
                ExprKind::Tuple(items)
            }
            Tok::Sym(Sym::LBrack) => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat_sym(Sym::RBrack) {
                    items.push(self.expr()?);
                    while self.eat_sym(Sym::Semi) {
                        if *self.peek() == Tok::Sym(Sym::RBrack) {
                            break;
                        }
                        items.push(self.expr()?);
                    }
                    self.expect_sym(Sym::RBrack, "`;` or `]`")?;
                }
                let sp = Span::new(start, self.prev_end());
                let mut acc = Expr::new(ExprKind::Construct("[]".into(), vec![]), Span::new(sp.end, sp.end));
                for it in items.into_iter().rev() {
                    let s = Span::new(it.span.start, sp.end);
                    acc = Expr::new(ExprKind::Construct("::".into(), vec![it, acc]), s);
                }
                return Ok(Expr::new(acc.kind, sp));
            }
            _ => return Err(self.error("an expression")),
        };
        Ok(Expr::new(kind, Span::new(start, self.prev_end())))
    }

    fn operator_section(&mut self, sym: Sym, span: Span) -> Expr {
        let a = self.fresh_name();
        let b = self.fresh_name();
        let va = Expr::new(ExprKind::Var(a.clone()), span);
        let vb = Expr::new(ExprKind::Var(b.clone()), span);
        let op = match sym {
            Sym::Plus => BinOp::Add,
            Sym::Minus => BinOp::Sub,
            Sym::Star => BinOp::Mul,
            Sym::Eq => BinOp::Eq,
            Sym::Lt => BinOp::Lt,
            Sym::Le => BinOp::Le,
            Sym::Gt => BinOp::Gt,
            Sym::Ge => BinOp::Ge,
            Sym::AndAnd => BinOp::And,
            _ => BinOp::Or,
        };
        let body = Expr::new(ExprKind::BinOp(op, Box::new(va), Box::new(vb)), span);
        Expr::new(ExprKind::Lambda(vec![Param::untyped(a), Param::untyped(b)], Box::new(body)), span)
    }

    // ---------------------------------------------------------------- patterns

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let first = self.pat_cons()?;
        if *self.peek() != Tok::Sym(Sym::Comma) {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_sym(Sym::Comma) {
            items.push(self.pat_cons()?);
        }
        let sp = items[0].span.join(items[items.len() - 1].span);
        Ok(Pattern { kind: PatternKind::Tuple(items), span: sp })
    }

    fn pat_cons(&mut self) -> Result<Pattern, ParseError> {
        let head = self.pat_app()?;
        if self.eat_sym(Sym::ColonColon) {
            let tail = self.pat_cons()?;
            let sp = head.span.join(tail.span);
            return Ok(Pattern { kind: PatternKind::Construct("::".into(), vec![head, tail]), span: sp });
        }
        Ok(head)
    }

    fn pat_app(&mut self) -> Result<Pattern, ParseError> {
        let start = self.span().start;
        if let Tok::UIdent(c) = self.peek().clone() {
            self.bump();
            let args = if self.eat_sym(Sym::LParen) {
                let mut items = vec![self.pattern_no_tuple()?];
                while self.eat_sym(Sym::Comma) {
                    items.push(self.pattern_no_tuple()?);
                }
                self.expect_sym(Sym::RParen, "`)`")?;
                items
            } else if self.starts_pat_atom() {
                vec![self.pat_atom()?]
            } else {
                vec![]
            };
            return Ok(Pattern { kind: PatternKind::Construct(c, args), span: Span::new(start, self.prev_end()) });
        }
        self.pat_atom()
    }

    fn pattern_no_tuple(&mut self) -> Result<Pattern, ParseError> {
        self.pat_cons()
    }

    fn starts_pat_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Int(_)
                | Tok::Ident(_)
                | Tok::UIdent(_)
                | Tok::Kw(Kw::True)
                | Tok::Kw(Kw::False)
                | Tok::Sym(Sym::LParen)
                | Tok::Sym(Sym::LBrack)
                | Tok::Sym(Sym::Underscore)
                | Tok::Sym(Sym::Minus)
        )
    }

    fn pat_atom(&mut self) -> Result<Pattern, ParseError> {
        let start = self.span().start;
        let kind = match self.peek().clone() {
            Tok::Sym(Sym::Underscore) => {
                self.bump();
                PatternKind::Wildcard
            }
            Tok::Ident(n) => {
                self.bump();
                if n.contains('.') {
                    return Err(ParseError::at(self.src, start, "qualified name cannot be bound in a pattern"));
                }
                PatternKind::Var(n)
            }
            Tok::UIdent(c) => {
                self.bump();
                PatternKind::Construct(c, vec![])
            }
            Tok::Int(n) => {
                self.bump();
                PatternKind::Int(n)
            }
            Tok::Sym(Sym::Minus) => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        PatternKind::Int(-n)
                    }
                    _ => return Err(self.error("integer literal after `-` in pattern")),
                }
            }
            Tok::Kw(Kw::True) => {
                self.bump();
                PatternKind::Bool(true)
            }
            Tok::Kw(Kw::False) => {
                self.bump();
                PatternKind::Bool(false)
            }
            Tok::Sym(Sym::LParen) => {
                self.bump();
                let p = self.pattern()?;
                self.expect_sym(Sym::RParen, "`)`")?;
                return Ok(Pattern { kind: p.kind, span: Span::new(start, self.prev_end()) });
            }
            Tok::Sym(Sym::LBrack) => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat_sym(Sym::RBrack) {
                    items.push(self.pattern()?);
                    while self.eat_sym(Sym::Semi) {
                        items.push(self.pattern()?);
                    }
                    self.expect_sym(Sym::RBrack, "`;` or `]`")?;
                }
                let sp = Span::new(start, self.prev_end());
                let mut acc = Pattern { kind: PatternKind::Construct("[]".into(), vec![]), span: sp };
                for it in items.into_iter().rev() {
                    acc = Pattern { kind: PatternKind::Construct("::".into(), vec![it, acc]), span: sp };
                }
                return Ok(acc);
            }
            _ => return Err(self.error("a pattern")),
        };
        Ok(Pattern { kind, span: Span::new(start, self.prev_end()) })
    }
}

fn is_operator_section(s: Sym) -> bool {
    matches!(
        s,
        Sym::Plus | Sym::Minus | Sym::Star | Sym::Eq | Sym::Lt | Sym::Le | Sym::Gt | Sym::Ge | Sym::AndAnd | Sym::OrOr
    )
}

/// Members of the built-in modules, used to resolve `M.( ... )`.
pub fn module_members(m: &str) -> &'static [&'static str] {
    match m {
        "List" => &["length", "append", "rev", "map", "fold_left"],
        "Ordinal" => &["of_int", "lt", "plus", "shift", "pair", "Int", "Cons"],
        _ => &[],
    }
}

fn qualify(e: &Expr, m: &str, bound: &mut Vec<String>) -> Expr {
    let members = module_members(m);
    let q = |x: &str| alloc::format!("{}.{}", m, x);
    let kind = match &e.kind {
        ExprKind::Var(x) if !bound.contains(x) && members.contains(&x.as_str()) => ExprKind::Var(q(x)),
        ExprKind::Construct(c, args) => {
            let c2 = if members.contains(&c.as_str()) { q(c) } else { c.clone() };
            ExprKind::Construct(c2, args.iter().map(|a| qualify(a, m, bound)).collect())
        }
        ExprKind::App(f, args) => {
            ExprKind::App(Box::new(qualify(f, m, bound)), args.iter().map(|a| qualify(a, m, bound)).collect())
        }
        ExprKind::Lambda(ps, b) => {
            let mark = bound.len();
            bound.extend(ps.iter().map(|p| p.name.clone()));
            let b2 = qualify(b, m, bound);
            bound.truncate(mark);
            ExprKind::Lambda(ps.clone(), Box::new(b2))
        }
        ExprKind::Let(x, a, b) => {
            let a2 = qualify(a, m, bound);
            bound.push(x.clone());
            let b2 = qualify(b, m, bound);
            bound.pop();
            ExprKind::Let(x.clone(), Box::new(a2), Box::new(b2))
        }
        ExprKind::If(c, t, f) => ExprKind::If(
            Box::new(qualify(c, m, bound)),
            Box::new(qualify(t, m, bound)),
            Box::new(qualify(f, m, bound)),
        ),
        ExprKind::Match(s, bs) => ExprKind::Match(
            Box::new(qualify(s, m, bound)),
            bs.iter()
                .map(|b| {
                    let mark = bound.len();
                    b.pat.bound_vars(bound);
                    let body = qualify(&b.body, m, bound);
                    bound.truncate(mark);
                    Branch { pat: b.pat.clone(), body }
                })
                .collect(),
        ),
        ExprKind::Tuple(xs) => ExprKind::Tuple(xs.iter().map(|a| qualify(a, m, bound)).collect()),
        ExprKind::BinOp(op, a, b) => ExprKind::BinOp(*op, Box::new(qualify(a, m, bound)), Box::new(qualify(b, m, bound))),
        ExprKind::Not(a) => ExprKind::Not(Box::new(qualify(a, m, bound))),
        _ => e.kind.clone(),
    };
    Expr::new(kind, e.span)
}
