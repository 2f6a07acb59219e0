//! Recursive-descent parser.
//!
//! ```text
//! expr   := term { ";" term }
//! term   := factor { "*" factor }
//! factor := "id(" INT ")" | "cup" | "cap" | "proj"
//!         | "op(" LABEL ["," FLAVOR] ")" | "ket(" LABEL ")" | "bra(" LABEL ")"
//!         | NUMBER | "(" expr ")"
//! ```

use num_complex::Complex64;
use tlcalc_core::Flavor;

use super::ast::{Expr, ExprKind, Span};
use super::lexer::{tokenize, Tok, Token};
use super::DslError;

pub fn parse(text: &str) -> Result<Expr, DslError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    p.expect(Tok::Eof, "`;`, `*` or end of input")?;
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Span, DslError> {
        let t = self.bump();
        if t.tok == tok {
            Ok(t.span)
        } else {
            Err(DslError::syntax(
                t.span,
                format!("expected {what}, found {}", t.tok.describe()),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr, DslError> {
        let mut e = self.term()?;
        while self.peek().tok == Tok::Semi {
            self.bump();
            e = Expr::compose(e, self.term()?);
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut e = self.factor()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            e = Expr::tensor(e, self.factor()?);
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<Expr, DslError> {
        let t = self.bump();
        let span = t.span;
        let kind = match t.tok {
            Tok::LParen => {
                let mut e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                e.span = span;
                return Ok(e);
            }
            Tok::Word(w) => match w.as_str() {
                "cup" => ExprKind::Cup,
                "cap" => ExprKind::Cap,
                "proj" => ExprKind::Proj,
                "id" => {
                    self.expect(Tok::LParen, "`(` after `id`")?;
                    let n = self.int()?;
                    self.expect(Tok::RParen, "`)`")?;
                    ExprKind::Id(n)
                }
                "op" => {
                    self.expect(Tok::LParen, "`(` after `op`")?;
                    let label = self.label()?;
                    let flavor = if self.peek().tok == Tok::Comma {
                        self.bump();
                        self.flavor()?
                    } else {
                        Flavor::Plain
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    ExprKind::Op(label, flavor)
                }
                "ket" | "bra" => {
                    self.expect(Tok::LParen, &format!("`(` after `{w}`"))?;
                    let label = self.label()?;
                    self.expect(Tok::RParen, "`)`")?;
                    if w == "ket" {
                        ExprKind::Ket(label)
                    } else {
                        ExprKind::Bra(label)
                    }
                }
                _ => match parse_number(&w) {
                    Some(z) => ExprKind::Scalar(z),
                    None => {
                        return Err(DslError::syntax(span, format!("unknown term `{w}`")));
                    }
                },
            },
            other => {
                return Err(DslError::syntax(
                    span,
                    format!("expected a diagram, found {}", other.describe()),
                ))
            }
        };
        Ok(Expr::new(kind, span))
    }

    fn int(&mut self) -> Result<usize, DslError> {
        let t = self.bump();
        match &t.tok {
            Tok::Word(w) if w.bytes().all(|b| b.is_ascii_digit()) => w
                .parse()
                .map_err(|_| DslError::syntax(t.span, format!("integer `{w}` is too large"))),
            other => Err(DslError::syntax(
                t.span,
                format!("expected an integer, found {}", other.describe()),
            )),
        }
    }

    fn label(&mut self) -> Result<String, DslError> {
        let t = self.bump();
        match t.tok {
            Tok::Word(w) if is_label(&w) => Ok(w),
            other => Err(DslError::syntax(
                t.span,
                format!("expected a label, found {}", other.describe()),
            )),
        }
    }

    fn flavor(&mut self) -> Result<Flavor, DslError> {
        let t = self.bump();
        match t.tok {
            Tok::Word(w) => match w.as_str() {
                "dag" => Ok(Flavor::Adjoint),
                "T" => Ok(Flavor::Transpose),
                "conj" => Ok(Flavor::Conjugate),
                _ => Err(DslError::UnknownFlavor { span: t.span, name: w }),
            },
            other => Err(DslError::syntax(
                t.span,
                format!("expected a flavor, found {}", other.describe()),
            )),
        }
    }
}

pub fn is_label(w: &str) -> bool {
    !w.is_empty() && w.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '#')
}

fn parse_real(s: &str) -> Option<f64> {
    // Reject `inf`, `nan` and friends, which `f64::from_str` would accept.
    if !s.trim_start_matches(['+', '-']).starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_number(w: &str) -> Option<Complex64> {
    let Some(body) = w.strip_suffix('i') else {
        return parse_real(w).map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Some(Complex64::new(parse_real(&body[..k])?, parse_real(&body[k..])?)),
        None => Some(Complex64::new(0.0, parse_real(body)?)),
    }
}
