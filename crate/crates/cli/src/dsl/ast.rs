use std::fmt;

use num_complex::Complex64;
use tlcalc_core::Flavor;

/// Position of a node in the source text. Lines and columns start at 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

/// Structural equality; spans are ignored.
impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Id(usize),
    Cup,
    Cap,
    Proj,
    Op(String, Flavor),
    Ket(String),
    Bra(String),
    Scalar(Complex64),
    Tensor(Box<Expr>, Box<Expr>),
    Compose(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    /// Build a node without a meaningful position.
    pub fn bare(kind: ExprKind) -> Self {
        Expr::new(kind, Span::default())
    }

    pub fn tensor(a: Expr, b: Expr) -> Self {
        let span = a.span;
        Expr::new(ExprKind::Tensor(Box::new(a), Box::new(b)), span)
    }

    pub fn compose(a: Expr, b: Expr) -> Self {
        let span = a.span;
        Expr::new(ExprKind::Compose(Box::new(a), Box::new(b)), span)
    }
}
