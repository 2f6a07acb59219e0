use num_complex::Complex64;
use serde::Serialize;

use super::Diagram;
use crate::error::{Error, Result};

/// A formal complex-linear combination of diagrams of one signature.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramSum {
    upper: usize,
    lower: usize,
    terms: Vec<(Complex64, Diagram)>,
}

impl DiagramSum {
    /// The zero map between the given arities.
    pub fn zero(upper: usize, lower: usize) -> Self {
        DiagramSum {
            upper,
            lower,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(
        upper: usize,
        lower: usize,
        terms: impl IntoIterator<Item = (Complex64, Diagram)>,
    ) -> Result<Self> {
        let mut sum = DiagramSum::zero(upper, lower);
        for (c, d) in terms {
            sum = sum.plus(c, d)?;
        }
        Ok(sum)
    }

    pub fn arities(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn terms(&self) -> &[(Complex64, Diagram)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(mut self, coefficient: Complex64, diagram: Diagram) -> Result<Self> {
        if diagram.arities() != self.arities() {
            return Err(Error::ArityMismatch {
                first: self.arities(),
                second: diagram.arities(),
            });
        }
        self.terms.push((coefficient, diagram));
        Ok(self)
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        for (c, _) in &mut self.terms {
            *c *= factor;
        }
        self
    }

    pub fn tensor(&self, other: &DiagramSum) -> DiagramSum {
        let terms = self
            .terms
            .iter()
            .flat_map(|(a, x)| other.terms.iter().map(move |(b, y)| (a * b, x.tensor(y))))
            .collect();
        DiagramSum {
            upper: self.upper + other.upper,
            lower: self.lower + other.lower,
            terms,
        }
    }

    pub fn compose(&self, second: &DiagramSum) -> Result<DiagramSum> {
        if self.lower != second.upper {
            return Err(Error::ArityMismatch {
                first: self.arities(),
                second: second.arities(),
            });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * second.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &second.terms {
                terms.push((a * b, x.compose(y)?));
            }
        }
        Ok(DiagramSum {
            upper: self.upper,
            lower: second.lower,
            terms,
        })
    }

    pub fn dagger(&self) -> DiagramSum {
        DiagramSum {
            upper: self.lower,
            lower: self.upper,
            terms: self
                .terms
                .iter()
                .map(|(c, d)| (c.conj(), d.dagger()))
                .collect(),
        }
    }
}

impl From<Diagram> for DiagramSum {
    fn from(d: Diagram) -> Self {
        let (upper, lower) = d.arities();
        DiagramSum {
            upper,
            lower,
            terms: vec![(Complex64::new(1.0, 0.0), d)],
        }
    }
}
