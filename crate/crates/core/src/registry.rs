//! Named matrices and vectors used to resolve decoration and terminal labels.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagram::Flavor;
use crate::error::{Error, Result};
use crate::numeric::{pauli, weyl_basis, ComplexMatrix};

/// Tolerance for the unitary and hermitian flags.
pub const FLAG_TOLERANCE: f64 = 1e-9;

/// Prefix of labels minted by [`Registry::derive`].
pub const DERIVED_PREFIX: char = '#';

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixEntry {
    pub matrix: ComplexMatrix,
    pub unitary: bool,
    pub hermitian: bool,
}

#[derive(Clone, Debug)]
pub struct Registry {
    d: usize,
    matrices: BTreeMap<String, MatrixEntry>,
    vectors: BTreeMap<String, Vec<Complex64>>,
    // Shared by clones: keys are content hashes, so entries never conflict.
    derived: Arc<RwLock<HashMap<String, ComplexMatrix>>>,
}

impl Registry {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Registry("dimension must be positive".into()));
        }
        Ok(Registry {
            d,
            matrices: BTreeMap::new(),
            vectors: BTreeMap::new(),
            derived: Arc::default(),
        })
    }

    /// Built-in labels: `1`, `U1`..`U{d²}` (Weyl basis, `U1` = identity) and,
    /// at `d = 2`, the Paulis `s1`, `s2`, `s3`.
    pub fn standard(d: usize) -> Result<Self> {
        let mut r = Registry::new(d)?;
        r.insert_flagged("1", ComplexMatrix::identity(d), true, true)?;
        for (n, u) in weyl_basis(d).into_iter().enumerate() {
            let herm = u.is_hermitian(FLAG_TOLERANCE);
            r.insert_flagged(format!("U{}", n + 1), u, true, herm)?;
        }
        if d == 2 {
            let (s1, s2, s3) = pauli();
            r.insert_flagged("s1", s1, true, true)?;
            r.insert_flagged("s2", s2, true, true)?;
            r.insert_flagged("s3", s3, true, true)?;
        }
        Ok(r)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn check_square(&self, m: &ComplexMatrix) -> Result<()> {
        if m.shape() != (self.d, self.d) {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: if m.rows() == self.d { m.cols() } else { m.rows() },
            });
        }
        if !m.is_finite() {
            return Err(Error::Registry("matrix entries must be finite".into()));
        }
        Ok(())
    }

    pub fn insert(&mut self, label: impl Into<String>, m: ComplexMatrix) -> Result<()> {
        self.insert_flagged(label, m, false, false)
    }

    /// Insert a matrix whose flags are checked against [`FLAG_TOLERANCE`].
    pub fn insert_flagged(
        &mut self,
        label: impl Into<String>,
        m: ComplexMatrix,
        unitary: bool,
        hermitian: bool,
    ) -> Result<()> {
        let label = label.into();
        self.check_square(&m)?;
        if unitary && !m.is_unitary(FLAG_TOLERANCE) {
            return Err(Error::RegistryFlag {
                label,
                property: "unitary",
            });
        }
        if hermitian && !m.is_hermitian(FLAG_TOLERANCE) {
            return Err(Error::RegistryFlag {
                label,
                property: "hermitian",
            });
        }
        self.matrices.insert(
            label,
            MatrixEntry {
                matrix: m,
                unitary,
                hermitian,
            },
        );
        Ok(())
    }

    pub fn insert_vector(&mut self, label: impl Into<String>, v: Vec<Complex64>) -> Result<()> {
        if v.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: v.len(),
            });
        }
        self.vectors.insert(label.into(), v);
        Ok(())
    }

    /// Builder form of [`Registry::insert`].
    pub fn with(mut self, label: impl Into<String>, m: ComplexMatrix) -> Result<Self> {
        self.insert(label, m)?;
        Ok(self)
    }

    /// Builder form of [`Registry::insert_vector`].
    pub fn with_vector(mut self, label: impl Into<String>, v: Vec<Complex64>) -> Result<Self> {
        self.insert_vector(label, v)?;
        Ok(self)
    }

    pub fn entry(&self, label: &str) -> Option<&MatrixEntry> {
        self.matrices.get(label)
    }

    pub fn matrix(&self, label: &str) -> Result<ComplexMatrix> {
        if let Some(e) = self.matrices.get(label) {
            return Ok(e.matrix.clone());
        }
        self.derived
            .read()
            .expect("derived table poisoned")
            .get(label)
            .cloned()
            .ok_or_else(|| Error::UnresolvedLabel(label.to_string()))
    }

    pub fn flavored(&self, label: &str, flavor: Flavor) -> Result<ComplexMatrix> {
        Ok(self.matrix(label)?.flavored(flavor))
    }

    pub fn vector(&self, label: &str) -> Result<&[Complex64]> {
        self.vectors
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnresolvedLabel(label.to_string()))
    }

    pub fn has_matrix(&self, label: &str) -> bool {
        self.matrix(label).is_ok()
    }

    pub fn matrix_labels(&self) -> impl Iterator<Item = &str> {
        self.matrices.keys().map(String::as_str)
    }

    pub fn vector_labels(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    /// Bind `m` under a label derived from its entries. Matrices equal to
    /// within about `1e-10` share a label.
    pub fn derive(&self, m: &ComplexMatrix) -> Result<String> {
        self.check_square(m)?;
        let label = content_label(m);
        self.derived
            .write()
            .expect("derived table poisoned")
            .entry(label.clone())
            .or_insert_with(|| m.clone());
        Ok(label)
    }

    pub fn is_derived(label: &str) -> bool {
        label.starts_with(DERIVED_PREFIX)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RegistryFile =
            serde_json::from_str(text).map_err(|e| Error::Registry(e.to_string()))?;
        let mut r = Registry::standard(file.d)?;
        for (label, rows) in file.matrices {
            let rows: Vec<Vec<Complex64>> = rows
                .into_iter()
                .map(|row| row.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                .collect();
            r.insert(label, ComplexMatrix::from_rows(&rows)?)?;
        }
        for (label, v) in file.vectors {
            r.insert_vector(label, v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())?;
        }
        Ok(r)
    }

    /// Serialize the non-derived entries.
    pub fn to_json(&self) -> String {
        let pair = |z: &Complex64| [z.re, z.im];
        let file = RegistryFile {
            d: self.d,
            matrices: self
                .matrices
                .iter()
                .map(|(k, e)| {
                    let rows = e.matrix.row_vecs().iter().map(|r| r.iter().map(pair).collect()).collect();
                    (k.clone(), rows)
                })
                .collect(),
            vectors: self
                .vectors
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(pair).collect()))
                .collect(),
        };
        serde_json::to_string(&file).expect("registry serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct RegistryFile {
    d: usize,
    #[serde(default)]
    matrices: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    vectors: BTreeMap<String, Vec<[f64; 2]>>,
}

fn content_label(m: &ComplexMatrix) -> String {
    let mut h = Sha256::new();
    h.update((m.rows() as u64).to_le_bytes());
    for z in m.entries() {
        for x in [z.re, z.im] {
            let q = (x * 1e10).round() as i64;
            h.update(q.to_le_bytes());
        }
    }
    let digest = h.finalize();
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("{DERIVED_PREFIX}{hex}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::random_matrix;

    #[test]
    fn standard_contents() {
        let r = Registry::standard(2).unwrap();
        assert!(r.has_matrix("1"));
        assert!(r.has_matrix("U4"));
        assert!(!r.has_matrix("U5"));
        assert!(r.has_matrix("s2"));
        assert!(r.entry("s3").unwrap().hermitian);
        let r3 = Registry::standard(3).unwrap();
        assert!(r3.has_matrix("U9"));
        assert!(!r3.has_matrix("s1"));
    }

    #[test]
    fn rejects_wrong_dimension_and_false_flags() {
        let mut r = Registry::new(2).unwrap();
        assert!(matches!(
            r.insert("M", ComplexMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let m = random_matrix(2, 1);
        assert_eq!(
            r.insert_flagged("M", m, true, false),
            Err(Error::RegistryFlag {
                label: "M".into(),
                property: "unitary"
            })
        );
        assert!(r.insert_vector("v", vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(Registry::new(0).is_err());
    }

    #[test]
    fn unresolved_label() {
        let r = Registry::new(2).unwrap();
        assert_eq!(r.matrix("nope"), Err(Error::UnresolvedLabel("nope".into())));
        assert_eq!(r.vector("psi").unwrap_err(), Error::UnresolvedLabel("psi".into()));
    }

    #[test]
    fn derived_labels_are_content_addressed() {
        let r = Registry::standard(3).unwrap();
        let m = random_matrix(3, 5);
        let a = r.derive(&m).unwrap();
        let b = r.clone().derive(&m).unwrap();
        assert_eq!(a, b);
        assert!(Registry::is_derived(&a));
        assert_eq!(r.matrix(&a).unwrap(), m);
        let c = r.derive(&random_matrix(3, 6)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn json_round_trip() {
        let r = Registry::new(2)
            .unwrap()
            .with("M", random_matrix(2, 3))
            .unwrap()
            .with_vector("psi", vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)])
            .unwrap();
        let back = Registry::from_json(&r.to_json()).unwrap();
        assert_eq!(back.matrix("M").unwrap(), r.matrix("M").unwrap());
        assert_eq!(back.vector("psi").unwrap(), r.vector("psi").unwrap());
        assert!(back.has_matrix("U1"));
    }

    #[test]
    fn json_rejects_ragged_rows() {
        let text = r#"{"d": 2, "matrices": {"M": [[[1,0],[0,0]],[[0,0]]]}}"#;
        assert!(Registry::from_json(text).is_err());
    }
}
