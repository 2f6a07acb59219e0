//! Lowering of diagrams to tensors.
//!
//! A diagram is already fully threaded, so its value factors into one small
//! tensor per strand (with its one or two boundary legs) times a scalar
//! collecting loops, terminal-only strands and powers of `d`. Dense matrices
//! are produced from that factored form by outer products and one axis
//! permutation.

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;

use super::{d_pow, ComplexMatrix, ONE};
use crate::diagram::{Bead, Diagram, DiagramSum, Endpoint, Strand};
use crate::error::{Error, Result};
use crate::registry::Registry;

/// Largest dense result (in entries) the evaluator will build.
pub const MAX_DENSE_ENTRIES: u128 = 10_000_000;

/// How factors are combined. All orders give the same value up to rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ContractionOrder {
    /// Strand order; decoration chains multiplied from the start endpoint.
    #[default]
    Sequential,
    /// Reverse strand order; decoration chains multiplied from the end.
    Reversed,
    /// Smallest factors first.
    Greedy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryAxis {
    Top(usize),
    Bottom(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub axes: Vec<BoundaryAxis>,
    pub data: ArrayD<Complex64>,
}

/// The value of a diagram as `scalar · ⊗ factors`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredTensor {
    pub d: usize,
    pub upper: usize,
    pub lower: usize,
    pub scalar: Complex64,
    pub factors: Vec<Factor>,
}

fn check_size(d: usize, legs: usize) -> Result<()> {
    let entries = (d as u128).checked_pow(legs as u32).unwrap_or(u128::MAX);
    if entries > MAX_DENSE_ENTRIES {
        return Err(Error::ProblemTooLarge {
            entries,
            limit: MAX_DENSE_ENTRIES,
        });
    }
    Ok(())
}

/// Flavored matrix product along a word, entered with flow `first_with`.
/// Returns `W = D'_k ⋯ D'_1`.
fn word_matrix(
    word: &[Bead],
    flows: &[bool],
    reg: &Registry,
    order: ContractionOrder,
) -> Result<ComplexMatrix> {
    let d = reg.dim();
    let mut mats = Vec::new();
    for (bead, &with) in word.iter().zip(flows) {
        if let Bead::Op(dec) = bead {
            let m = reg.flavored(&dec.label, dec.flavor)?;
            mats.push(if with { m } else { m.transpose() });
        }
    }
    let id = ComplexMatrix::identity(d);
    Ok(match order {
        ContractionOrder::Reversed => mats.iter().rev().fold(id, |acc, m| acc.matmul(m)),
        _ => mats.iter().fold(id, |acc, m| m.matmul(&acc)),
    })
}

fn axis(e: &Endpoint) -> Option<BoundaryAxis> {
    match e {
        Endpoint::Top(i) => Some(BoundaryAxis::Top(*i)),
        Endpoint::Bottom(i) => Some(BoundaryAxis::Bottom(*i)),
        _ => None,
    }
}

/// Vector a terminal contracts with: kets as given, bras conjugated.
fn terminal_vector(e: &Endpoint, reg: &Registry) -> Result<Vec<Complex64>> {
    match e {
        Endpoint::Ket(l) => Ok(reg.vector(l)?.to_vec()),
        Endpoint::Bra(l) => Ok(reg.vector(l)?.iter().map(|z| z.conj()).collect()),
        _ => unreachable!("boundary endpoints have axes"),
    }
}

/// `S[s, e] = norm · W[e, s]` contracted with any terminal vectors.
enum StrandValue {
    Scalar(Complex64),
    Factor(Factor),
}

fn strand_value(s: &Strand, reg: &Registry, order: ContractionOrder) -> Result<StrandValue> {
    let d = reg.dim();
    let w = word_matrix(&s.word, &s.flows(), reg, order)?;
    let norm = if s.is_bent() {
        1.0 / (d as f64).sqrt()
    } else {
        1.0
    };
    // S = norm · Wᵀ, indexed [start, end]
    let st = w.transpose().scale(Complex64::new(norm, 0.0));
    let out = match (axis(&s.start), axis(&s.end)) {
        (Some(a), Some(b)) => {
            let data = ArrayD::from_shape_vec(IxDyn(&[d, d]), st.entries()).expect("d x d");
            StrandValue::Factor(Factor {
                axes: vec![a, b],
                data,
            })
        }
        (Some(a), None) => {
            let t = terminal_vector(&s.end, reg)?;
            let v = st.matmul(&ComplexMatrix::column(&t));
            StrandValue::Factor(Factor {
                axes: vec![a],
                data: ArrayD::from_shape_vec(IxDyn(&[d]), v.entries()).expect("d"),
            })
        }
        (None, Some(b)) => {
            let t = terminal_vector(&s.start, reg)?;
            let v = ComplexMatrix::row(&t).matmul(&st);
            StrandValue::Factor(Factor {
                axes: vec![b],
                data: ArrayD::from_shape_vec(IxDyn(&[d]), v.entries()).expect("d"),
            })
        }
        (None, None) => {
            let a = terminal_vector(&s.start, reg)?;
            let b = terminal_vector(&s.end, reg)?;
            let v = ComplexMatrix::row(&a)
                .matmul(&st)
                .matmul(&ComplexMatrix::column(&b));
            StrandValue::Scalar(v.get(0, 0))
        }
    };
    Ok(out)
}

/// Lower a diagram to factored form.
pub fn factorize(
    diagram: &Diagram,
    d: usize,
    reg: &Registry,
    order: ContractionOrder,
) -> Result<FactoredTensor> {
    if reg.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: reg.dim(),
        });
    }
    let mut scalar = diagram.scalar_factor() * d_pow(d, diagram.d_power());
    let mut factors = Vec::new();
    for s in diagram.strands() {
        match strand_value(s, reg, order)? {
            StrandValue::Scalar(z) => scalar *= z,
            StrandValue::Factor(f) => factors.push(f),
        }
    }
    for l in diagram.loops() {
        let w = word_matrix(&l.word, &l.flows(), reg, order)?;
        scalar *= w.trace() / d as f64;
    }
    Ok(FactoredTensor {
        d,
        upper: diagram.upper_arity(),
        lower: diagram.lower_arity(),
        scalar,
        factors,
    })
}

fn outer(parts: &[&Factor]) -> (Vec<BoundaryAxis>, ArrayD<Complex64>) {
    let mut axes = Vec::new();
    let mut data = ArrayD::from_elem(IxDyn(&[]), ONE);
    for f in parts {
        axes.extend(f.axes.iter().copied());
        let mut shape = data.shape().to_vec();
        shape.extend_from_slice(f.data.shape());
        let mut entries = Vec::with_capacity(data.len() * f.data.len());
        for a in data.iter() {
            entries.extend(f.data.iter().map(|b| a * b));
        }
        data = ArrayD::from_shape_vec(IxDyn(&shape), entries).expect("outer shape");
    }
    (axes, data)
}

/// Reorder tensor axes to follow `target`, returning row-major entries.
fn permute(axes: &[BoundaryAxis], data: ArrayD<Complex64>, target: &[BoundaryAxis]) -> Vec<Complex64> {
    let perm: Vec<usize> = target
        .iter()
        .map(|t| axes.iter().position(|a| a == t).expect("axis present"))
        .collect();
    data.permuted_axes(IxDyn(&perm)).iter().copied().collect()
}

fn ordered(factors: &[Factor], order: ContractionOrder) -> Vec<&Factor> {
    let mut v: Vec<&Factor> = factors.iter().collect();
    match order {
        ContractionOrder::Sequential => {}
        ContractionOrder::Reversed => v.reverse(),
        ContractionOrder::Greedy => v.sort_by_key(|f| f.data.len()),
    }
    v
}

impl FactoredTensor {
    pub fn dense_entries(&self) -> u128 {
        (self.d as u128)
            .checked_pow((self.upper + self.lower) as u32)
            .unwrap_or(u128::MAX)
    }

    /// Dense `d^lower × d^upper` matrix.
    pub fn to_dense(&self, order: ContractionOrder) -> Result<ComplexMatrix> {
        check_size(self.d, self.upper + self.lower)?;
        let (axes, data) = outer(&ordered(&self.factors, order));
        let target: Vec<BoundaryAxis> = (0..self.lower)
            .map(BoundaryAxis::Bottom)
            .chain((0..self.upper).map(BoundaryAxis::Top))
            .collect();
        let entries: Vec<Complex64> = permute(&axes, data, &target)
            .into_iter()
            .map(|z| z * self.scalar)
            .collect();
        ComplexMatrix::from_vec(self.d.pow(self.lower as u32), self.d.pow(self.upper as u32), entries)
    }

    /// Max-abs entrywise difference to `other` without building the full
    /// matrices: blocks of boundary legs on which both sides agree exactly
    /// are factored out.
    pub fn residual(&self, other: &FactoredTensor) -> Result<f64> {
        if (self.d, self.upper, self.lower) != (other.d, other.upper, other.lower) {
            return Ok(f64::INFINITY);
        }
        let n = self.upper + self.lower;
        let index = |a: &BoundaryAxis| match a {
            BoundaryAxis::Top(i) => *i,
            BoundaryAxis::Bottom(j) => self.upper + j,
        };
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for f in self.factors.iter().chain(&other.factors) {
            for w in f.axes.windows(2) {
                let (a, b) = (find(&mut parent, index(&w[0])), find(&mut parent, index(&w[1])));
                parent[a] = b;
            }
        }
        let mut roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        let block_of = roots.clone();
        roots.sort_unstable();
        roots.dedup();

        let in_block = |f: &Factor, r: usize| block_of[index(&f.axes[0])] == r;
        let mut common = 1.0;
        let mut rest_a: Vec<&Factor> = Vec::new();
        let mut rest_b: Vec<&Factor> = Vec::new();
        for &r in &roots {
            let fa: Vec<&Factor> = self.factors.iter().filter(|f| in_block(f, r)).collect();
            let fb: Vec<&Factor> = other.factors.iter().filter(|f| in_block(f, r)).collect();
            let mut target: Vec<BoundaryAxis> = fa.iter().flat_map(|f| f.axes.iter().copied()).collect();
            target.sort();
            check_size(self.d, target.len())?;
            let (ax_a, da) = outer(&fa);
            let (ax_b, db) = outer(&fb);
            let va = permute(&ax_a, da, &target);
            let vb = permute(&ax_b, db, &target);
            if va == vb {
                common *= va.iter().map(|z| z.norm()).fold(0.0, f64::max);
            } else {
                rest_a.extend(fa);
                rest_b.extend(fb);
            }
        }
        let mut target: Vec<BoundaryAxis> = rest_a.iter().flat_map(|f| f.axes.iter().copied()).collect();
        target.sort();
        check_size(self.d, target.len())?;
        let (ax_a, da) = outer(&rest_a);
        let (ax_b, db) = outer(&rest_b);
        let va = permute(&ax_a, da, &target);
        let vb = permute(&ax_b, db, &target);
        let diff = va
            .iter()
            .zip(&vb)
            .map(|(x, y)| (x * self.scalar - y * other.scalar).norm())
            .fold(0.0, f64::max);
        Ok(common * diff)
    }
}

/// Dense matrix of shape `d^lower × d^upper`.
pub fn evaluate(diagram: &Diagram, d: usize, reg: &Registry) -> Result<ComplexMatrix> {
    evaluate_with(diagram, d, reg, ContractionOrder::default())
}

pub fn evaluate_with(
    diagram: &Diagram,
    d: usize,
    reg: &Registry,
    order: ContractionOrder,
) -> Result<ComplexMatrix> {
    check_size(d, diagram.upper_arity() + diagram.lower_arity())?;
    factorize(diagram, d, reg, order)?.to_dense(order)
}

/// Linear extension of [`evaluate`]; the empty sum is the zero matrix.
pub fn evaluate_sum(sum: &DiagramSum, d: usize, reg: &Registry) -> Result<ComplexMatrix> {
    let (u, l) = sum.arities();
    check_size(d, u + l)?;
    let mut acc = ComplexMatrix::zeros(d.pow(l as u32), d.pow(u as u32));
    for (c, term) in sum.terms() {
        acc = acc.add(&evaluate(term, d, reg)?.scale(*c));
    }
    Ok(acc)
}
