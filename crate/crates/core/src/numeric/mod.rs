//! Dense complex linear algebra and the lowering of diagrams to matrices.

mod eval;
mod random;

use std::f64::consts::PI;
use std::fmt;

use ndarray::{Array2, Axis};
use num_complex::Complex64;

use crate::diagram::Flavor;
use crate::error::{Error, Result};

pub use eval::{evaluate, evaluate_sum, evaluate_with, factorize, ContractionOrder, FactoredTensor, MAX_DENSE_ENTRIES};
pub use random::{
    random_density, random_matrix, random_rank1_observable, random_state, random_unitary,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense complex matrix in row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(Array2<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(Array2::from_elem((rows, cols), ZERO))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(Array2::from_diag_elem(n, ONE))
    }

    pub fn scalar(value: Complex64) -> Self {
        ComplexMatrix(Array2::from_elem((1, 1), value))
    }

    pub fn from_array(a: Array2<Complex64>) -> Self {
        ComplexMatrix(a)
    }

    /// Build from row-major `entries`.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Array2::from_shape_vec((rows, cols), entries)
            .map(ComplexMatrix)
            .map_err(|e| Error::InvalidDiagram(e.to_string()))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        ComplexMatrix::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn column(entries: &[Complex64]) -> Self {
        ComplexMatrix(
            Array2::from_shape_vec((entries.len(), 1), entries.to_vec()).expect("shape matches"),
        )
    }

    pub fn row(entries: &[Complex64]) -> Self {
        ComplexMatrix(
            Array2::from_shape_vec((1, entries.len()), entries.to_vec()).expect("shape matches"),
        )
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[[r, c]]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.0[[r, c]] = v;
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> Vec<Complex64> {
        self.0.iter().copied().collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<Complex64>> {
        self.0.outer_iter().map(|r| r.to_vec()).collect()
    }

    /// Matrix product `self · rhs`. Panics if the inner dimensions differ.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "matmul of {:?} by {:?}",
            self.shape(),
            rhs.shape()
        );
        ComplexMatrix(self.0.dot(&rhs.0))
    }

    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(ndarray::linalg::kron(&self.0, &rhs.0))
    }

    pub fn kron_all<'a>(parts: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
        parts
            .into_iter()
            .fold(ComplexMatrix::scalar(ONE), |acc, m| acc.kron(m))
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix(self.0.t().to_owned())
    }

    pub fn conj(&self) -> ComplexMatrix {
        ComplexMatrix(self.0.mapv(|z| z.conj()))
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix(self.0.t().mapv(|z| z.conj()))
    }

    /// The matrix as drawn by a decoration of the given flavor.
    pub fn flavored(&self, flavor: Flavor) -> ComplexMatrix {
        match flavor {
            Flavor::Plain => self.clone(),
            Flavor::Adjoint => self.adjoint(),
            Flavor::Transpose => self.transpose(),
            Flavor::Conjugate => self.conj(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.0.diag().sum()
    }

    pub fn scale(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix(&self.0 * factor)
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        ComplexMatrix(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        ComplexMatrix(&self.0 - &rhs.0)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of the difference; infinite when the
    /// shapes differ.
    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> f64 {
        if self.shape() != rhs.shape() {
            return f64::INFINITY;
        }
        self.0
            .iter()
            .zip(rhs.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, rhs: &ComplexMatrix, tol: f64) -> bool {
        self.max_abs_diff(rhs) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && self
                .adjoint()
                .matmul(self)
                .approx_eq(&ComplexMatrix::identity(self.rows()), tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), tol)
    }

    /// Integer power of a square matrix.
    pub fn pow(&self, k: usize) -> ComplexMatrix {
        (0..k).fold(ComplexMatrix::identity(self.rows()), |acc, _| acc.matmul(self))
    }

    /// Columns of the matrix as vectors.
    pub fn column_vec(&self, c: usize) -> Vec<Complex64> {
        self.0.index_axis(Axis(1), c).to_vec()
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.0.outer_iter() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// `d^k` as a float, for possibly negative `k`.
pub fn d_pow(d: usize, k: i32) -> f64 {
    (d as f64).powi(k)
}

/// `|Ω⟩ = (1/√d) Σ_i e_i ⊗ e_i` as a `d² × 1` column.
pub fn omega_vec(d: usize) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(d * d, 1);
    let norm = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v.set(i * d + i, 0, norm);
    }
    v
}

/// The projector `ω = |Ω⟩⟨Ω|`.
pub fn omega_projector(d: usize) -> ComplexMatrix {
    let v = omega_vec(d);
    v.matmul(&v.adjoint())
}

/// Cyclic shift `X e_j = e_{j+1 mod d}`.
pub fn shift(d: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        x.set((j + 1) % d, j, ONE);
    }
    x
}

/// Clock `Z e_j = exp(2πi j/d) e_j`.
pub fn clock(d: usize) -> ComplexMatrix {
    let mut z = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        z.set(j, j, Complex64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64));
    }
    z
}

/// Weyl–Heisenberg unitaries `U_n = X^a Z^b` with `n = a·d + b` (0-based),
/// so the identity comes first.
pub fn weyl_basis(d: usize) -> Vec<ComplexMatrix> {
    let (x, z) = (shift(d), clock(d));
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            out.push(x.pow(a).matmul(&z.pow(b)));
        }
    }
    out
}

/// The Pauli matrices `(σ1, σ2, σ3)`.
pub fn pauli() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let i = Complex64::i();
    let m = |rows: [[Complex64; 2]; 2]| {
        ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).expect("2x2")
    };
    (
        m([[ZERO, ONE], [ONE, ZERO]]),
        m([[ZERO, -i], [i, ZERO]]),
        m([[ONE, ZERO], [ZERO, -ONE]]),
    )
}

/// Partial trace of a `d^k × d^k` operator over the listed tensor factors
/// (0 = most significant).
pub fn partial_trace(m: &ComplexMatrix, d: usize, traced: &[usize]) -> Result<ComplexMatrix> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    let mut k = 0;
    while d.pow(k as u32) < n {
        k += 1;
    }
    if d.pow(k as u32) != n {
        return Err(Error::DimensionMismatch {
            expected: d.pow(k as u32),
            found: n,
        });
    }
    let mut seen = vec![false; k];
    for &t in traced {
        if t >= k {
            return Err(Error::IndexOutOfRange { index: t, bound: k });
        }
        if std::mem::replace(&mut seen[t], true) {
            return Err(Error::DuplicateIndex(t));
        }
    }
    let kept: Vec<usize> = (0..k).filter(|i| !seen[*i]).collect();
    let digits = |mut x: usize| {
        let mut out = vec![0; k];
        for slot in out.iter_mut().rev() {
            *slot = x % d;
            x /= d;
        }
        out
    };
    let kept_index = |ds: &[usize]| kept.iter().fold(0, |acc, &i| acc * d + ds[i]);
    let size = d.pow(kept.len() as u32);
    let mut out = ComplexMatrix::zeros(size, size);
    for r in 0..n {
        let dr = digits(r);
        for c in 0..n {
            let dc = digits(c);
            if traced.iter().all(|&t| dr[t] == dc[t]) {
                let (i, j) = (kept_index(&dr), kept_index(&dc));
                out.set(i, j, out.get(i, j) + m.get(r, c));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_is_unit_norm() {
        assert_eq!(omega_vec(1), ComplexMatrix::scalar(ONE));
        for d in 2..=8 {
            let v = omega_vec(d);
            let n = v.adjoint().matmul(&v).get(0, 0);
            assert!((n - ONE).norm() < 1e-12);
        }
        let s = 1.0 / 2f64.sqrt();
        let expect: Vec<Complex64> = [s, 0.0, 0.0, s].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        assert!(omega_vec(2).approx_eq(&ComplexMatrix::column(&expect), 1e-15));
    }

    #[test]
    fn weyl_is_orthogonal_unitary_basis() {
        for d in 1..=5 {
            let basis = weyl_basis(d);
            assert_eq!(basis.len(), d * d);
            assert!(basis[0].approx_eq(&ComplexMatrix::identity(d), 0.0));
            for (n, u) in basis.iter().enumerate() {
                assert!(u.is_unitary(1e-12));
                for (m, v) in basis.iter().enumerate() {
                    let t = u.adjoint().matmul(v).trace();
                    let expect = if n == m { d as f64 } else { 0.0 };
                    assert!((t - Complex64::new(expect, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn weyl_at_two_is_pauli() {
        let (s1, _, s3) = pauli();
        let b = weyl_basis(2);
        assert!(b[1].approx_eq(&s3, 1e-15));
        assert!(b[2].approx_eq(&s1, 1e-15));
        assert!(b[3].approx_eq(&s1.matmul(&s3), 1e-15));
    }

    #[test]
    fn pauli_squares() {
        let (a, b, c) = pauli();
        for s in [a, b, c] {
            assert!(s.matmul(&s).approx_eq(&ComplexMatrix::identity(2), 0.0));
            assert!(s.is_hermitian(0.0));
        }
    }

    #[test]
    fn flavors() {
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(0.0, 3.0), Complex64::new(4.0, -1.0)],
        ])
        .unwrap();
        assert_eq!(m.flavored(Flavor::Transpose).get(0, 1), Complex64::new(0.0, 3.0));
        assert_eq!(m.flavored(Flavor::Conjugate).get(1, 0), Complex64::new(0.0, -3.0));
        assert_eq!(m.flavored(Flavor::Adjoint).get(0, 1), Complex64::new(0.0, -3.0));
        assert_eq!(m.flavored(Flavor::Plain), m);
    }

    #[test]
    fn kron_is_row_major_in_left_factor() {
        let (s1, _, s3) = pauli();
        let k = s1.kron(&s3);
        // (σ1 ⊗ σ3)|00⟩ = |10⟩
        assert_eq!(k.get(2, 0), ONE);
        assert_eq!(k.get(3, 1), -ONE);
    }

    #[test]
    fn partial_trace_of_projector() {
        let p = omega_projector(3);
        let t = partial_trace(&p, 3, &[1]).unwrap();
        assert!(t.approx_eq(&ComplexMatrix::identity(3).scale(Complex64::new(1.0 / 3.0, 0.0)), 1e-12));
        let full = partial_trace(&p, 3, &[0, 1]).unwrap();
        assert!((full.get(0, 0) - ONE).norm() < 1e-12);
        assert_eq!(partial_trace(&p, 3, &[1, 1]), Err(Error::DuplicateIndex(1)));
        assert!(matches!(partial_trace(&p, 3, &[2]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn from_rows_checks_shape() {
        assert!(ComplexMatrix::from_rows(&[vec![ONE], vec![ONE, ONE]]).is_err());
    }
}
