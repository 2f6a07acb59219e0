//! Seeded random operators. Each generator draws from its own ChaCha stream,
//! so the same seed gives unrelated values across generators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ComplexMatrix;

const UNITARY_STREAM: u64 = 1;
const STATE_STREAM: u64 = 2;
const DENSITY_STREAM: u64 = 3;
const OBSERVABLE_STREAM: u64 = 4;
const MATRIX_STREAM: u64 = 5;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn gaussian(r: &mut impl Rng) -> Complex64 {
    Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal))
}

fn normalized(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= n;
    }
    v
}

fn gaussian_vec(r: &mut impl Rng, d: usize) -> Vec<Complex64> {
    (0..d).map(|_| gaussian(r)).collect()
}

/// A unitary from Gram–Schmidt orthonormalization of a complex Gaussian
/// matrix.
pub fn random_unitary(d: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng(seed, UNITARY_STREAM);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = gaussian_vec(&mut r, d);
        for q in &cols {
            let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= overlap * y;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    let mut u = ComplexMatrix::zeros(d, d);
    for (c, col) in cols.iter().enumerate() {
        for (row, z) in col.iter().enumerate() {
            u.set(row, c, *z);
        }
    }
    u
}

/// A unit vector.
pub fn random_state(d: usize, seed: u64) -> Vec<Complex64> {
    normalized(gaussian_vec(&mut rng(seed, STATE_STREAM), d))
}

fn rank1(d: usize, r: &mut impl Rng) -> ComplexMatrix {
    let a = normalized(gaussian_vec(r, d));
    let b = normalized(gaussian_vec(r, d));
    ComplexMatrix::column(&a).matmul(&ComplexMatrix::row(&b).conj())
}

/// `|φ1⟩⟨φ2|` for two seeded unit vectors; not hermitian in general.
pub fn random_density(d: usize, seed: u64) -> ComplexMatrix {
    rank1(d, &mut rng(seed, DENSITY_STREAM))
}

/// `|ψ1⟩⟨ψ2|` for two seeded unit vectors.
pub fn random_rank1_observable(d: usize, seed: u64) -> ComplexMatrix {
    rank1(d, &mut rng(seed, OBSERVABLE_STREAM))
}

/// A complex Gaussian matrix.
pub fn random_matrix(d: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng(seed, MATRIX_STREAM);
    let entries = gaussian_vec(&mut r, d * d);
    ComplexMatrix::from_vec(d, d, entries).expect("square")
}
