//! Teleportation, dense coding, entanglement swapping and the TL algebra,
//! built as diagrams and checked against direct matrix arithmetic.
//!
//! Wires are ordered left to right as the systems are written: `C, A, B`
//! for teleportation and `a, b, c, d` for swapping. Every Kronecker product
//! follows that order.

mod catalog;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagram::{Bead, Diagram, DiagramSum, Endpoint, Flavor, Strand};
use crate::error::{Error, Result};
use crate::numeric::{
    evaluate, evaluate_sum, factorize, omega_projector, omega_vec, random_density,
    random_rank1_observable, random_state, weyl_basis, ComplexMatrix, ContractionOrder,
};
use crate::registry::Registry;
use crate::rewrite::close;

pub use catalog::{verify_identity, CATALOG};

/// Outcome of one numeric identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity_id: String,
    pub d: usize,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, usize>,
    /// Max-abs difference over every pair of sides and paths.
    pub residual: f64,
    /// Difference between the diagram path and the direct-matrix path.
    pub path_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityReport {
    pub fn new(id: &str, d: usize, seed: Option<u64>, residual: f64, path_gap: f64, tolerance: f64) -> Self {
        IdentityReport {
            identity_id: id.to_string(),
            d,
            seed,
            params: BTreeMap::new(),
            residual,
            path_gap,
            tolerance,
            passed: residual < tolerance,
        }
    }

    pub fn with_param(mut self, key: &str, value: usize) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn sort_key(&self) -> (String, usize, Option<u64>, Vec<(String, usize)>) {
        (
            self.identity_id.clone(),
            self.d,
            self.seed,
            self.params.iter().map(|(k, v)| (k.clone(), *v)).collect(),
        )
    }
}

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Max of several residuals, propagating NaN as infinity.
pub(crate) fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .map(|v| if v.is_nan() { f64::INFINITY } else { v })
        .fold(0.0, f64::max)
}

/// `tr(X·Y)` without forming the product.
pub(crate) fn trace_of_product(x: &ComplexMatrix, y: &ComplexMatrix) -> Complex64 {
    let (xa, ya) = (x.as_array(), y.as_array());
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            t += xa[[i, j]] * ya[[j, i]];
        }
    }
    t
}

/// Registry label of the Weyl unitary `U_n`, `n` counted from 1.
pub fn weyl_label(n: usize) -> String {
    format!("U{n}")
}

fn check_n(n: usize, d: usize) -> Result<()> {
    if n == 0 || n > d * d {
        return Err(Error::IndexOutOfRange {
            index: n,
            bound: d * d + 1,
        });
    }
    Ok(())
}

/// `|Ω_n⟩ = (U_n ⊗ 1)|Ω⟩`.
pub fn omega_n_ket(n: usize) -> Diagram {
    Diagram::ket_cup()
        .decorate_leg(0, true, weyl_label(n), Flavor::Plain)
        .expect("cup has one strand")
}

/// `⟨Ω_n|`.
pub fn omega_n_bra(n: usize) -> Diagram {
    omega_n_ket(n).dagger()
}

/// `ω_n = |Ω_n⟩⟨Ω_n|` as a (2, 2) diagram.
pub fn proj_n(n: usize) -> Diagram {
    omega_n_bra(n)
        .compose(&omega_n_ket(n))
        .expect("cap and cup compose over zero wires")
}

/// `T_n(O) = U_n† O U_n` on one wire.
pub fn channel(n: usize, label: &str) -> Diagram {
    Diagram::chain(&[
        Diagram::op(weyl_label(n), Flavor::Plain),
        Diagram::op(label, Flavor::Plain),
        Diagram::op(weyl_label(n), Flavor::Adjoint),
    ])
    .expect("single wires compose")
}

/// `E_i`: the projector on wires `i, i+1` (1-based) among `n` identities.
pub fn tl_generator(n: usize, i: usize) -> Result<Diagram> {
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, bound: n });
    }
    Ok(Diagram::tensor_all(&[
        Diagram::identity(i - 1),
        Diagram::proj(),
        Diagram::identity(n - i - 1),
    ]))
}

fn factored_gap(a: &Diagram, b: &Diagram, d: usize, reg: &Registry) -> Result<f64> {
    let fa = factorize(a, d, reg, ContractionOrder::Sequential)?;
    let fb = factorize(b, d, reg, ContractionOrder::Greedy)?;
    fa.residual(&fb)
}

/// Idempotence, hermiticity, `E_i E_{i±1} E_i = E_i / d²` and distant
/// commutation, one report per relation family.
pub fn check_tl_relations(n: usize, d: usize, tol: f64) -> Result<Vec<IdentityReport>> {
    if n < 2 {
        return Err(Error::IndexOutOfRange { index: n, bound: 2 });
    }
    let reg = Registry::standard(d)?;
    let e: Vec<Diagram> = (1..n).map(|i| tl_generator(n, i)).collect::<Result<_>>()?;
    let mut idem = 0.0f64;
    let mut herm = 0.0f64;
    let mut braid = 0.0f64;
    let mut commute = 0.0f64;
    let (mut n_braid, mut n_commute) = (0, 0);
    for (i, ei) in e.iter().enumerate() {
        idem = idem.max(factored_gap(&ei.compose(ei)?, ei, d, &reg)?);
        herm = herm.max(factored_gap(&ei.dagger(), ei, d, &reg)?);
        for (j, ej) in e.iter().enumerate() {
            if i.abs_diff(j) == 1 {
                let lhs = Diagram::chain([ei, ej, ei])?;
                let rhs = ei.clone().times_d_power(-2);
                braid = braid.max(factored_gap(&lhs, &rhs, d, &reg)?);
                n_braid += 1;
            } else if i.abs_diff(j) > 1 {
                commute = commute.max(factored_gap(&ei.compose(ej)?, &ej.compose(ei)?, d, &reg)?);
                n_commute += 1;
            }
        }
    }
    let mut out = vec![
        IdentityReport::new("tl_idempotent", d, None, idem, 0.0, tol).with_param("n", n),
        IdentityReport::new("tl_hermitian", d, None, herm, 0.0, tol).with_param("n", n),
    ];
    if n_braid > 0 {
        out.push(IdentityReport::new("tl_braid", d, None, braid, 0.0, tol).with_param("n", n));
    }
    if n_commute > 0 {
        out.push(IdentityReport::new("tl_commute", d, None, commute, 0.0, tol).with_param("n", n));
    }
    Ok(out)
}

fn teleport_registry(d: usize, psi_seed: u64) -> Result<Registry> {
    Registry::standard(d)?.with_vector("psi", random_state(d, psi_seed))
}

/// `(ω_n ⊗ 1_B) · (|ψ⟩_C ⊗ ω_AB)`, a map from `AB` to `CAB`.
pub fn teleport_lhs(n: usize) -> Diagram {
    Diagram::ket("psi")
        .tensor(&Diagram::proj())
        .compose(&proj_n(n).tensor(&Diagram::identity(1)))
        .expect("arities match")
}

/// `(1/d) · (|Ω_n⟩_CA ⊗ U_n†|ψ⟩_B) · ⟨Ω|_AB`.
pub fn teleport_rhs(n: usize) -> Diagram {
    let bob = Diagram::ket("psi")
        .compose(&Diagram::op(weyl_label(n), Flavor::Adjoint))
        .expect("arities match");
    Diagram::bra_cap()
        .compose(&omega_n_ket(n).tensor(&bob))
        .expect("arities match")
        .times_d_power(-1)
}

/// Teleportation with outcome `n` of Charlie's measurement.
pub fn teleport_verify(d: usize, n: usize, psi_seed: u64, tol: f64) -> Result<IdentityReport> {
    check_n(n, d)?;
    let reg = teleport_registry(d, psi_seed)?;
    let basis = weyl_basis(d);
    let un = &basis[n - 1];
    let id = ComplexMatrix::identity(d);
    let omega = omega_vec(d);
    let omega_n = un.kron(&id).matmul(&omega);
    let psi = ComplexMatrix::column(reg.vector("psi")?);

    let lhs_direct = omega_n
        .matmul(&omega_n.adjoint())
        .kron(&id)
        .matmul(&psi.kron(&omega_projector(d)));
    let rhs_direct = omega_n
        .kron(&un.adjoint().matmul(&psi))
        .matmul(&omega.adjoint())
        .scale(c(1.0 / d as f64));
    let lhs = evaluate(&teleport_lhs(n), d, &reg)?;
    let rhs = evaluate(&teleport_rhs(n), d, &reg)?;
    let gap = worst([lhs.max_abs_diff(&lhs_direct), rhs.max_abs_diff(&rhs_direct)]);
    let residual = worst([gap, lhs.max_abs_diff(&rhs), lhs_direct.max_abs_diff(&rhs_direct)]);
    Ok(IdentityReport::new("teleport", d, Some(psi_seed), residual, gap, tol).with_param("n", n))
}

/// Outcome statistics: each of the `d²` outcomes has probability `1/d²`
/// and the corrected state is `ψ` exactly.
pub fn teleport_outcomes_verify(d: usize, psi_seed: u64, tol: f64) -> Result<IdentityReport> {
    let reg = teleport_registry(d, psi_seed)?;
    let psi = ComplexMatrix::column(reg.vector("psi")?);
    let id = ComplexMatrix::identity(d);
    let state = psi.kron(&omega_vec(d));
    let mut total = 0.0;
    let mut worst_p = 0.0f64;
    for un in &weyl_basis(d) {
        let omega_n = un.kron(&id).matmul(&omega_vec(d));
        // Bob's unnormalized branch (⟨Ω_n|_CA ⊗ 1_B)(ψ ⊗ Ω_AB)
        let branch = omega_n.adjoint().kron(&id).matmul(&state);
        let p: f64 = branch.entries().iter().map(|z| z.norm_sqr()).sum();
        let corrected = un.matmul(&branch).scale(c(1.0 / p.sqrt()));
        let fidelity = psi.adjoint().matmul(&corrected).get(0, 0).norm_sqr();
        total += p * fidelity;
        worst_p = worst_p.max((p - 1.0 / (d * d) as f64).abs());
    }
    let residual = worst([(total - 1.0).abs(), worst_p]);
    Ok(IdentityReport::new("teleport_outcomes", d, Some(psi_seed), residual, 0.0, tol))
}

/// `(1 ⊗ ω_n ⊗ 1)(|Ω_l⟩_ab ⊗ |Ω_m⟩_cd)`.
pub fn swap_lhs(l: usize, n: usize, m: usize) -> Diagram {
    omega_n_ket(l)
        .tensor(&omega_n_ket(m))
        .compose(&Diagram::tensor_all(&[
            Diagram::identity(1),
            proj_n(n),
            Diagram::identity(1),
        ]))
        .expect("arities match")
}

/// `(1/d) |Ω_n⟩_bc ⊗ (U_l U_n* U_m ⊗ 1)|Ω⟩_ad`, with the three unitaries
/// collected on the `a` leg of the outer cup.
pub fn swap_rhs(l: usize, n: usize, m: usize) -> Diagram {
    let outer = Strand::new(
        Endpoint::Bottom(0),
        Endpoint::Bottom(3),
        vec![
            Bead::op(weyl_label(l), Flavor::Plain),
            Bead::op(weyl_label(n), Flavor::Conjugate),
            Bead::op(weyl_label(m), Flavor::Plain),
            Bead::Cup,
        ],
    );
    let inner = Strand::new(
        Endpoint::Bottom(1),
        Endpoint::Bottom(2),
        vec![Bead::op(weyl_label(n), Flavor::Plain), Bead::Cup],
    );
    Diagram::from_parts(0, 4, vec![outer, inner], vec![], c(1.0), -1).expect("valid swap diagram")
}

pub fn swap_verify(d: usize, l: usize, n: usize, m: usize, tol: f64) -> Result<IdentityReport> {
    for k in [l, n, m] {
        check_n(k, d)?;
    }
    let reg = Registry::standard(d)?;
    let basis = weyl_basis(d);
    let id = ComplexMatrix::identity(d);
    let omega = omega_vec(d);
    let omega_k = |k: usize| basis[k - 1].kron(&id).matmul(&omega);
    let lhs_direct = ComplexMatrix::kron_all(&[id.clone(), omega_k(n).matmul(&omega_k(n).adjoint()), id.clone()])
        .matmul(&omega_k(l).kron(&omega_k(m)));
    let v = basis[l - 1].matmul(&basis[n - 1].conj()).matmul(&basis[m - 1]);
    let ad = v.kron(&id).matmul(&omega);
    let bc = omega_k(n);
    let mut rhs_direct = ComplexMatrix::zeros(d.pow(4), 1);
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for e in 0..d {
                    let z = ad.get(a * d + e, 0) * bc.get(b * d + cc, 0) / d as f64;
                    rhs_direct.set(((a * d + b) * d + cc) * d + e, 0, z);
                }
            }
        }
    }
    let lhs = evaluate(&swap_lhs(l, n, m), d, &reg)?;
    let rhs = evaluate(&swap_rhs(l, n, m), d, &reg)?;
    let gap = worst([lhs.max_abs_diff(&lhs_direct), rhs.max_abs_diff(&rhs_direct)]);
    let residual = worst([gap, lhs.max_abs_diff(&rhs), lhs_direct.max_abs_diff(&rhs_direct)]);
    Ok(IdentityReport::new("swap", d, None, residual, gap, tol)
        .with_param("l", l)
        .with_param("n", n)
        .with_param("m", m))
}

/// `count` index triples drawn uniformly from `1..=d²`.
pub fn random_triples(d: usize, seed: u64, count: usize) -> Vec<(usize, usize, usize)> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let k = d * d;
    (0..count)
        .map(|_| (r.random_range(1..=k), r.random_range(1..=k), r.random_range(1..=k)))
        .collect()
}

fn rho_o_registry(d: usize, seed: u64) -> Result<Registry> {
    Registry::standard(d)?
        .with("rho", random_density(d, seed))?
        .with("O", random_rank1_observable(d, seed))
}

/// The closed term `n` of the tight teleportation equation.
pub fn tight_teleport_term(n: usize) -> Result<Diagram> {
    let state = Diagram::op("rho", Flavor::Plain).tensor(&Diagram::proj());
    let measure = proj_n(n).tensor(&channel(n, "O"));
    close(&measure.compose(&state)?)
}

/// `Σ_n tr((ρ ⊗ ω)(ω_n ⊗ T_n(O))) = tr(ρO)`.
pub fn tight_teleport_verify(d: usize, seed: u64, tol: f64) -> Result<IdentityReport> {
    let reg = rho_o_registry(d, seed)?;
    let rho = reg.matrix("rho")?;
    let o = reg.matrix("O")?;
    let target = rho.matmul(&o).trace();
    let state = rho.kron(&omega_projector(d));
    let mut direct = Complex64::new(0.0, 0.0);
    let mut diagram = Complex64::new(0.0, 0.0);
    for (i, un) in weyl_basis(d).iter().enumerate() {
        let omega_n = un.kron(&ComplexMatrix::identity(d)).matmul(&omega_vec(d));
        let tn = un.adjoint().matmul(&o).matmul(un);
        let meas = omega_n.matmul(&omega_n.adjoint()).kron(&tn);
        direct += trace_of_product(&state, &meas);
        diagram += evaluate(&tight_teleport_term(i + 1)?, d, &reg)?.get(0, 0);
    }
    let gap = (direct - diagram).norm();
    let residual = worst([(direct - target).norm(), (diagram - target).norm(), gap]);
    Ok(IdentityReport::new("tight_teleport", d, Some(seed), residual, gap, tol))
}

/// `⟨Ω_m| ω_n |Ω_m⟩` as a closed diagram.
pub fn densecode_term(n: usize, m: usize) -> Diagram {
    Diagram::chain(&[omega_n_ket(m), proj_n(n), omega_n_bra(m)]).expect("arities match")
}

/// Outcome probabilities `P[n, m] = ⟨Ω_m|ω_n|Ω_m⟩ = δ_nm`.
pub fn tight_densecode_verify(d: usize, tol: f64) -> Result<IdentityReport> {
    let reg = Registry::standard(d)?;
    let basis = weyl_basis(d);
    let id = ComplexMatrix::identity(d);
    let omegas: Vec<ComplexMatrix> = basis.iter().map(|u| u.kron(&id).matmul(&omega_vec(d))).collect();
    let mut residual = 0.0f64;
    let mut gap = 0.0f64;
    for (n, sent) in omegas.iter().enumerate() {
        let proj = sent.matmul(&sent.adjoint());
        for (m, read) in omegas.iter().enumerate() {
            let expect = c(if n == m { 1.0 } else { 0.0 });
            let direct = read.adjoint().matmul(&proj).matmul(read).get(0, 0);
            let diag = evaluate(&densecode_term(n + 1, m + 1), d, &reg)?.get(0, 0);
            gap = gap.max((direct - diag).norm());
            residual = worst([residual, (direct - expect).norm(), (diag - expect).norm()]);
        }
    }
    Ok(IdentityReport::new("tight_densecode", d, None, worst([residual, gap]), gap, tol))
}

/// The closed term `n` of the tight swapping equation.
pub fn tight_swap_term(n: usize) -> Result<Diagram> {
    let pairs = Diagram::proj().tensor(&Diagram::proj());
    let ops = Diagram::tensor_all(&[Diagram::op("rho", Flavor::Plain), proj_n(n), channel(n, "O")]);
    close(&pairs.compose(&ops)?)
}

/// `Σ_n tr((ρ_a ⊗ ω_n ⊗ T_n(O)_d)(ω_ab ⊗ ω_cd)) = (1/d) tr(ρ Oᵀ)`.
pub fn tight_swap_verify(d: usize, seed: u64, tol: f64) -> Result<IdentityReport> {
    let reg = rho_o_registry(d, seed)?;
    let rho = reg.matrix("rho")?;
    let o = reg.matrix("O")?;
    let target = rho.matmul(&o.transpose()).trace() / d as f64;
    let pairs = omega_projector(d).kron(&omega_projector(d));
    let mut direct = Complex64::new(0.0, 0.0);
    let mut diagram = Complex64::new(0.0, 0.0);
    for (i, un) in weyl_basis(d).iter().enumerate() {
        let omega_n = un.kron(&ComplexMatrix::identity(d)).matmul(&omega_vec(d));
        let tn = un.adjoint().matmul(&o).matmul(un);
        let ops = ComplexMatrix::kron_all(&[rho.clone(), omega_n.matmul(&omega_n.adjoint()), tn]);
        direct += trace_of_product(&ops, &pairs);
        diagram += evaluate(&tight_swap_term(i + 1)?, d, &reg)?.get(0, 0);
    }
    let gap = (direct - diagram).norm();
    let residual = worst([(direct - target).norm(), (diagram - target).norm(), gap]);
    Ok(IdentityReport::new("tight_swap", d, Some(seed), residual, gap, tol))
}

/// `C = ½(1⊗1 + 1⊗σ1 + σ3⊗1 − σ3⊗σ1)`, control on the left wire.
pub fn cnot_diagram() -> DiagramSum {
    let pair = |a: &str, b: &str| Diagram::op(a, Flavor::Plain).tensor(&Diagram::op(b, Flavor::Plain));
    DiagramSum::from_terms(
        2,
        2,
        [
            (c(0.5), pair("1", "1")),
            (c(0.5), pair("1", "s1")),
            (c(0.5), pair("s3", "1")),
            (c(-0.5), pair("s3", "s1")),
        ],
    )
    .expect("all terms are (2, 2)")
}

/// Truth table, involution and unitarity of the CNOT sum at `d = 2`.
pub fn cnot_verify(tol: f64) -> Result<IdentityReport> {
    let reg = Registry::standard(2)?;
    let cn = cnot_diagram();
    let m = evaluate_sum(&cn, 2, &reg)?;
    let mut table = ComplexMatrix::zeros(4, 4);
    for (input, output) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        table.set(output, input, c(1.0));
    }
    let square = evaluate_sum(&cn.compose(&cn)?, 2, &reg)?;
    let gram = evaluate_sum(&cn.compose(&cn.dagger())?, 2, &reg)?;
    let id = ComplexMatrix::identity(4);
    let residual = worst([
        m.max_abs_diff(&table),
        square.max_abs_diff(&id),
        gram.max_abs_diff(&id),
        m.matmul(&m).max_abs_diff(&id),
        m.adjoint().matmul(&m).max_abs_diff(&id),
    ]);
    Ok(IdentityReport::new("cnot", 2, None, residual, 0.0, tol))
}

/// Number of random swap triples checked per seed when `d > 2`.
pub const SWAP_TRIPLES: usize = 20;

/// Largest TL strand count checked by [`verify_all`].
pub const TL_MAX_STRANDS: usize = 6;

/// Every identity at dimension `d`: seeded checks once per seed, the rest
/// once. Sorted by identity, dimension and seed.
pub fn verify_all(d: usize, seeds: &[u64], tol: f64) -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    for id in CATALOG {
        if catalog::is_seeded(id) {
            for &s in seeds {
                out.push(verify_identity(id, d, Some(s), tol)?);
            }
        } else {
            out.push(verify_identity(id, d, None, tol)?);
        }
    }
    for n in 2..=TL_MAX_STRANDS {
        out.extend(check_tl_relations(n, d, tol)?);
    }
    for &s in seeds {
        for n in 1..=d * d {
            out.push(teleport_verify(d, n, s, tol)?);
        }
        out.push(teleport_outcomes_verify(d, s, tol)?);
        out.push(tight_teleport_verify(d, s, tol)?);
        out.push(tight_swap_verify(d, s, tol)?);
    }
    if d == 2 {
        for l in 1..=4 {
            for n in 1..=4 {
                for m in 1..=4 {
                    out.push(swap_verify(d, l, n, m, tol)?);
                }
            }
        }
        out.push(cnot_verify(tol)?);
    } else {
        for &s in seeds {
            for (l, n, m) in random_triples(d, s, SWAP_TRIPLES) {
                let mut r = swap_verify(d, l, n, m, tol)?;
                r.seed = Some(s);
                out.push(r);
            }
        }
    }
    out.push(tight_densecode_verify(d, tol)?);
    out.sort_by_key(IdentityReport::sort_key);
    Ok(out)
}
