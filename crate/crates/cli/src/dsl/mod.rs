//! A small text syntax for diagrams.
//!
//! `;` stacks diagrams top to bottom, `*` places them side by side and binds
//! tighter. `cup` is the entangled ket (two bottom points), `cap` the bra (two
//! top points), and `proj` the two-point projector `cap ; cup`.

mod ast;
mod lexer;
mod parser;

use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;
use tlcalc_core::{Diagram, Flavor};

pub use ast::{Expr, ExprKind, Span};
pub use parser::{is_label, parse, parse_number};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DslError {
    #[error("{span}: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: unknown flavor `{name}` (expected dag, T or conj)")]
    UnknownFlavor { span: Span, name: String },
    #[error(
        "{span}: cannot compose a {}→{} diagram with a {}→{} diagram",
        first.0, first.1, second.0, second.1
    )]
    ArityMismatch {
        span: Span,
        first: (usize, usize),
        second: (usize, usize),
    },
}

impl DslError {
    pub(crate) fn syntax(span: Span, message: impl Into<String>) -> Self {
        DslError::Syntax {
            span,
            message: message.into(),
        }
    }

    pub fn span(&self) -> Span {
        match self {
            DslError::Syntax { span, .. }
            | DslError::UnknownFlavor { span, .. }
            | DslError::ArityMismatch { span, .. } => *span,
        }
    }
}

/// `(upper, lower)` point counts, checking every composition.
pub fn arity(e: &Expr) -> Result<(usize, usize), DslError> {
    Ok(match &e.kind {
        ExprKind::Id(n) => (*n, *n),
        ExprKind::Cup => (0, 2),
        ExprKind::Cap => (2, 0),
        ExprKind::Proj => (2, 2),
        ExprKind::Op(..) => (1, 1),
        ExprKind::Ket(_) => (0, 1),
        ExprKind::Bra(_) => (1, 0),
        ExprKind::Scalar(_) => (0, 0),
        ExprKind::Tensor(a, b) => {
            let (a, b) = (arity(a)?, arity(b)?);
            (a.0 + b.0, a.1 + b.1)
        }
        ExprKind::Compose(a, b) => {
            let (first, second) = (arity(a)?, arity(b)?);
            if first.1 != second.0 {
                return Err(DslError::ArityMismatch {
                    span: b.span,
                    first,
                    second,
                });
            }
            (first.0, second.1)
        }
    })
}

/// Lower a checked expression to a diagram.
pub fn elaborate(e: &Expr) -> Result<Diagram, DslError> {
    arity(e)?;
    Ok(build(e))
}

fn build(e: &Expr) -> Diagram {
    match &e.kind {
        ExprKind::Id(n) => Diagram::identity(*n),
        ExprKind::Cup => Diagram::ket_cup(),
        ExprKind::Cap => Diagram::bra_cap(),
        ExprKind::Proj => Diagram::proj(),
        ExprKind::Op(label, flavor) => Diagram::op(label.clone(), *flavor),
        ExprKind::Ket(label) => Diagram::ket(label.clone()),
        ExprKind::Bra(label) => Diagram::bra(label.clone()),
        ExprKind::Scalar(z) => Diagram::scalar(*z),
        ExprKind::Tensor(a, b) => build(a).tensor(&build(b)),
        ExprKind::Compose(a, b) => build(a)
            .compose(&build(b))
            .expect("arities checked before building"),
    }
}

/// Parse and elaborate in one go.
pub fn compile(text: &str) -> Result<Diagram, DslError> {
    elaborate(&parse(text)?)
}

fn write_number(out: &mut String, z: Complex64) {
    if z.im == 0.0 {
        write!(out, "{}", z.re).unwrap();
    } else if z.re == 0.0 {
        write!(out, "{}i", z.im).unwrap();
    } else if z.im.is_sign_negative() {
        write!(out, "{}-{}i", z.re, -z.im).unwrap();
    } else {
        write!(out, "{}+{}i", z.re, z.im).unwrap();
    }
}

fn write_expr(out: &mut String, e: &Expr, prec: u8) {
    match &e.kind {
        ExprKind::Id(n) => write!(out, "id({n})").unwrap(),
        ExprKind::Cup => out.push_str("cup"),
        ExprKind::Cap => out.push_str("cap"),
        ExprKind::Proj => out.push_str("proj"),
        ExprKind::Op(label, Flavor::Plain) => write!(out, "op({label})").unwrap(),
        ExprKind::Op(label, flavor) => write!(out, "op({label}, {})", flavor.as_str()).unwrap(),
        ExprKind::Ket(label) => write!(out, "ket({label})").unwrap(),
        ExprKind::Bra(label) => write!(out, "bra({label})").unwrap(),
        ExprKind::Scalar(z) => write_number(out, *z),
        ExprKind::Compose(a, b) => binary(out, a, " ; ", b, 0, prec),
        ExprKind::Tensor(a, b) => binary(out, a, " * ", b, 1, prec),
    }
}

// Both operators associate to the left, so a right operand of equal
// precedence needs parentheses.
fn binary(out: &mut String, a: &Expr, op: &str, b: &Expr, own: u8, outer: u8) {
    let wrap = own < outer;
    if wrap {
        out.push('(');
    }
    write_expr(out, a, own);
    out.push_str(op);
    write_expr(out, b, own + 1);
    if wrap {
        out.push(')');
    }
}

/// Source text that parses back to `e`.
pub fn to_source(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tlcalc_core::{evaluate, Registry};

    fn value(text: &str, d: usize) -> tlcalc_core::ComplexMatrix {
        evaluate(&compile(text).unwrap(), d, &Registry::standard(d).unwrap()).unwrap()
    }

    #[test]
    fn cup_then_cap_is_one_and_cap_then_cup_is_proj() {
        let one = value("cup ; cap", 5);
        assert_eq!(one.shape(), (1, 1));
        assert!((one.get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(compile("cap ; cup").unwrap(), Diagram::proj());
    }

    #[test]
    fn decorated_cap() {
        let d = compile("(op(M) * id(1)) ; cap").unwrap();
        assert_eq!(d.arities(), (2, 0));
        assert_eq!(compile("id(1) ; id(1)").unwrap(), Diagram::identity(1));
    }

    #[test]
    fn arity_mismatch_reports_both_sides() {
        let err = compile("cup ;\n id(3)").unwrap_err();
        assert_eq!(
            err,
            DslError::ArityMismatch {
                span: Span { line: 2, col: 2 },
                first: (0, 2),
                second: (3, 3)
            }
        );
        assert!(err.to_string().contains("0→2"));
    }

    #[test]
    fn serializer_parenthesizes_right_operands() {
        for text in [
            "id(1) ; (id(1) ; id(1))",
            "cup * (cup * cup)",
            "(cup ; cap) * 2",
            "op(A, dag) * op(B, T) ; proj",
            "1.5-2i * 0.25i * -3",
        ] {
            let e = parse(text).unwrap();
            assert_eq!(parse(&to_source(&e)).unwrap(), e, "{text}");
        }
        assert_eq!(to_source(&parse("(cup)").unwrap()), "cup");
    }
}
