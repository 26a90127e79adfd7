use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use num_bigint::BigInt;

/// Byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SourceModule {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Type(TypeDecl),
    Fun(FunGroup),
    Theorem(TheoremDecl),
    Directive(Directive),
}

impl Decl {
    pub fn span(&self) -> Span {
        match self {
            Decl::Type(t) => t.span,
            Decl::Fun(g) => g.span,
            Decl::Theorem(t) => t.span,
            Decl::Directive(d) => d.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<CtorDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtorDecl {
    pub name: String,
    pub args: Vec<TyExpr>,
}

/// Surface type syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TyExpr {
    Var(String),
    Con(String, Vec<TyExpr>),
    Tuple(Vec<TyExpr>),
    Arrow(Box<TyExpr>, Box<TyExpr>),
}

/// `let [rec] f ... [and g ...]`. Mutual groups hold at most two definitions.
#[derive(Debug, Clone, PartialEq)]
pub struct FunGroup {
    pub is_rec: bool,
    pub defs: Vec<FunDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub ret: Option<TyExpr>,
    pub body: Expr,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: Option<TyExpr>,
}

impl Param {
    pub fn untyped(name: impl Into<String>) -> Self {
        Param { name: name.into(), ty: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Expr,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectiveKind {
    Verify,
    Instance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Directive {
    pub kind: DirectiveKind,
    pub goal: Expr,
    pub bound: Option<u64>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Annotation {
    Adm(Vec<String>),
    Measure(Expr),
    Auto,
    Rewrite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul)
    }

    pub fn is_compare(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_logic(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Int(BigInt),
    Bool(bool),
    Var(String),
    App(Box<Expr>, Vec<Expr>),
    Lambda(Vec<Param>, Box<Expr>),
    Let(String, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Match(Box<Expr>, Vec<Branch>),
    Construct(String, Vec<Expr>),
    Tuple(Vec<Expr>),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Builds a node with an empty span; used by generated code.
    pub fn synth(kind: ExprKind) -> Self {
        Expr { kind, span: Span::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub pat: Pattern,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub kind: PatternKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternKind {
    Var(String),
    Wildcard,
    Construct(String, Vec<Pattern>),
    Tuple(Vec<Pattern>),
    Int(BigInt),
    Bool(bool),
}

impl Pattern {
    pub fn synth(kind: PatternKind) -> Self {
        Pattern { kind, span: Span::default() }
    }

    pub fn bound_vars(&self, out: &mut Vec<String>) {
        match &self.kind {
            PatternKind::Var(v) => out.push(v.clone()),
            PatternKind::Construct(_, ps) | PatternKind::Tuple(ps) => {
                for p in ps {
                    p.bound_vars(out);
                }
            }
            _ => {}
        }
    }
}
