//! Named identities between maximally entangled states, cups and caps.

use num_complex::Complex64;

use super::{c, omega_n_bra, omega_n_ket, proj_n, worst, IdentityReport};
use crate::diagram::{Diagram, DiagramSum, Endpoint, Flavor, Strand};
use crate::error::{Error, Result};
use crate::numeric::{
    evaluate, evaluate_sum, omega_projector, omega_vec, random_density, random_matrix,
    random_rank1_observable, weyl_basis, ComplexMatrix,
};
use crate::registry::Registry;
use crate::rewrite::{close, normalize, partial_close, slide, Direction, Site};

pub const CATALOG: [&str; 13] = [
    "op_slide",
    "trace_pair",
    "transfer",
    "weyl_orthogonality",
    "completeness",
    "cup_fusion",
    "cap_fusion",
    "ptrace_projector",
    "ptrace_transfer",
    "circle_two_ways",
    "circle_oblique",
    "snake_left",
    "snake_right",
];

/// Identities quantified over random operators.
pub(crate) fn is_seeded(id: &str) -> bool {
    matches!(id, "op_slide" | "trace_pair" | "circle_two_ways" | "circle_oblique")
}

/// Check one catalog identity. Seeded identities default to seed 0.
pub fn verify_identity(id: &str, d: usize, seed: Option<u64>, tol: f64) -> Result<IdentityReport> {
    if !CATALOG.contains(&id) {
        return Err(Error::UnknownIdentity(id.to_string()));
    }
    let seed = if is_seeded(id) { Some(seed.unwrap_or(0)) } else { None };
    let s = seed.unwrap_or(0);
    let (residual, gap) = match id {
        "op_slide" => op_slide(d, s)?,
        "trace_pair" => trace_pair(d, s)?,
        "transfer" => transfer(d)?,
        "weyl_orthogonality" => weyl_orthogonality(d)?,
        "completeness" => completeness(d)?,
        "cup_fusion" => fusion(d, false)?,
        "cap_fusion" => fusion(d, true)?,
        "ptrace_projector" => ptrace_projector(d)?,
        "ptrace_transfer" => ptrace_transfer(d)?,
        "circle_two_ways" => circle_two_ways(d, s)?,
        "circle_oblique" => circle_oblique(d, s)?,
        "snake_left" => snake(d, true)?,
        "snake_right" => snake(d, false)?,
        _ => unreachable!("catalog membership checked above"),
    };
    Ok(IdentityReport::new(id, d, seed, worst([residual, gap]), gap, tol))
}

fn eval(diagram: &Diagram, reg: &Registry) -> Result<ComplexMatrix> {
    evaluate(diagram, reg.dim(), reg)
}

fn scalar_of(diagram: &Diagram, reg: &Registry) -> Result<Complex64> {
    Ok(eval(diagram, reg)?.get(0, 0))
}

/// `(M ⊗ 1)|Ω⟩ = (1 ⊗ Mᵀ)|Ω⟩`, also through the slide rewrite.
fn op_slide(d: usize, seed: u64) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?.with("M", random_matrix(d, seed))?;
    let m = reg.matrix("M")?;
    let id = ComplexMatrix::identity(d);
    let left = Diagram::ket_cup().decorate_leg(0, true, "M", Flavor::Plain)?;
    let right = Diagram::ket_cup().decorate_leg(0, false, "M", Flavor::Transpose)?;
    let slid = slide(&left, Site::Strand(0), 0, Direction::TowardEnd)?;
    let structural = if slid == right { 0.0 } else { f64::INFINITY };
    let lhs_direct = m.kron(&id).matmul(&omega_vec(d));
    let rhs_direct = id.kron(&m.transpose()).matmul(&omega_vec(d));
    let (l, r) = (eval(&left, &reg)?, eval(&right, &reg)?);
    let gap = worst([l.max_abs_diff(&lhs_direct), r.max_abs_diff(&rhs_direct)]);
    Ok((worst([structural, l.max_abs_diff(&r), lhs_direct.max_abs_diff(&rhs_direct)]), gap))
}

/// `tr(MN) = d · ⟨Ω|(M ⊗ 1)(N ⊗ 1)|Ω⟩`.
fn trace_pair(d: usize, seed: u64) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?
        .with("M", random_matrix(d, seed))?
        .with("N", random_matrix(d, seed.wrapping_add(1 << 32)))?;
    let (m, n) = (reg.matrix("M")?, reg.matrix("N")?);
    let id = ComplexMatrix::identity(d);
    let target = m.matmul(&n).trace();
    let circle = Diagram::chain(&[
        Diagram::ket_cup(),
        Diagram::op("N", Flavor::Plain).tensor(&Diagram::identity(1)),
        Diagram::op("M", Flavor::Plain).tensor(&Diagram::identity(1)),
        Diagram::bra_cap(),
    ])?
    .times_d_power(1);
    let diagram = scalar_of(&circle, &reg)?;
    let (normal, _) = normalize(&circle, &reg)?;
    let normalized = normal.scalar_factor();
    let omega = omega_vec(d);
    let direct = omega
        .adjoint()
        .matmul(&m.kron(&id))
        .matmul(&n.kron(&id))
        .matmul(&omega)
        .get(0, 0)
        * d as f64;
    let gap = (diagram - direct).norm();
    Ok((
        worst([(diagram - target).norm(), (direct - target).norm(), (normalized - target).norm()]),
        gap,
    ))
}

/// `T_BC = d · ⟨Ω|_CA |Ω⟩_AB` is the identity map from `C` to `B`.
fn transfer(d: usize) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?;
    let id = ComplexMatrix::identity(d);
    let diagram = Diagram::identity(1)
        .tensor(&Diagram::ket_cup())
        .compose(&Diagram::bra_cap().tensor(&Diagram::identity(1)))?
        .times_d_power(1);
    let direct = omega_vec(d)
        .adjoint()
        .kron(&id)
        .matmul(&id.kron(&omega_vec(d)))
        .scale(c(d as f64));
    let v = eval(&diagram, &reg)?;
    let gap = v.max_abs_diff(&direct);
    Ok((worst([v.max_abs_diff(&id), direct.max_abs_diff(&id)]), gap))
}

/// `tr(U_n† U_m) = d δ_nm` and `⟨Ω_n|Ω_m⟩ = δ_nm`.
fn weyl_orthogonality(d: usize) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?;
    let basis = weyl_basis(d);
    let id = ComplexMatrix::identity(d);
    let mut residual = 0.0f64;
    let mut gap = 0.0f64;
    for n in 1..=d * d {
        for m in 1..=d * d {
            let delta = if n == m { 1.0 } else { 0.0 };
            let tr = basis[n - 1].adjoint().matmul(&basis[m - 1]).trace();
            let inner = scalar_of(&omega_n_ket(m).compose(&omega_n_bra(n))?, &reg)?;
            let on = basis[n - 1].kron(&id).matmul(&omega_vec(d));
            let om = basis[m - 1].kron(&id).matmul(&omega_vec(d));
            let direct = on.adjoint().matmul(&om).get(0, 0);
            gap = gap.max((inner - direct).norm());
            residual = worst([
                residual,
                (tr - c(d as f64 * delta)).norm(),
                (inner - c(delta)).norm(),
                (direct - c(delta)).norm(),
            ]);
        }
    }
    Ok((residual, gap))
}

/// `Σ_n |Ω_n⟩⟨Ω_n|` is the identity on the two-wire space.
fn completeness(d: usize) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?;
    let sum = DiagramSum::from_terms(2, 2, (1..=d * d).map(|n| (c(1.0), proj_n(n))))?;
    let v = evaluate_sum(&sum, d, &reg)?;
    let id = ComplexMatrix::identity(d);
    let mut direct = ComplexMatrix::zeros(d * d, d * d);
    for u in weyl_basis(d) {
        let o = u.kron(&id).matmul(&omega_vec(d));
        direct = direct.add(&o.matmul(&o.adjoint()));
    }
    let target = ComplexMatrix::identity(d * d);
    Ok((
        worst([v.max_abs_diff(&target), direct.max_abs_diff(&target)]),
        v.max_abs_diff(&direct),
    ))
}

/// Cup fusion `⟨Ω|_BC (|Ω⟩_AB |Ω⟩_CD) = (1/d)|Ω⟩_AD` and its dagger dual.
fn fusion(d: usize, caps: bool) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?;
    let id = ComplexMatrix::identity(d);
    let id1 = Diagram::identity(1);
    let diagram = if caps {
        Diagram::tensor_all(&[id1.clone(), Diagram::ket_cup(), id1])
            .compose(&Diagram::bra_cap().tensor(&Diagram::bra_cap()))?
    } else {
        Diagram::ket_cup()
            .tensor(&Diagram::ket_cup())
            .compose(&Diagram::tensor_all(&[id1.clone(), Diagram::bra_cap(), id1]))?
    };
    let expected = if caps { Diagram::bra_cap() } else { Diagram::ket_cup() }.scaled(c(1.0 / d as f64));
    let (normal, _) = normalize(&diagram, &reg)?;
    let structural = if normal.approx_eq(&expected, 1e-12) { 0.0 } else { f64::INFINITY };

    let omega = omega_vec(d);
    let cups = omega.kron(&omega);
    let mid = ComplexMatrix::kron_all(&[id.clone(), omega.adjoint(), id.clone()]);
    let direct = if caps {
        cups.adjoint().matmul(&mid.adjoint())
    } else {
        mid.matmul(&cups)
    };
    let target = if caps { omega.adjoint() } else { omega.clone() }.scale(c(1.0 / d as f64));
    let v = eval(&diagram, &reg)?;
    Ok((
        worst([structural, v.max_abs_diff(&target), direct.max_abs_diff(&target)]),
        v.max_abs_diff(&direct),
    ))
}

/// `tr_A(|Ω⟩_CA ⟨Ω|_CA) = (1/d) 1_C`.
fn ptrace_projector(d: usize) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?;
    let v = eval(&partial_close(&Diagram::proj(), &[(1, 1)])?, &reg)?;
    let direct = crate::numeric::partial_trace(&omega_projector(d), d, &[1])?;
    let target = ComplexMatrix::identity(d).scale(c(1.0 / d as f64));
    Ok((
        worst([v.max_abs_diff(&target), direct.max_abs_diff(&target)]),
        v.max_abs_diff(&direct),
    ))
}

/// `(1/d) T_CB = tr_A(|Ω⟩_CA ⟨Ω|_AB)` and `(1/d) T_BC = tr_A(⟨Ω|_CA |Ω⟩_AB)`.
fn ptrace_transfer(d: usize) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?;
    let target = ComplexMatrix::identity(d).scale(c(1.0 / d as f64));
    let omega = omega_vec(d);
    let outer = omega.matmul(&omega.adjoint());
    let mut residual = 0.0f64;
    let mut gap = 0.0f64;
    // (top, bottom) index of the shared system A
    for (top, bottom) in [(0, 1), (1, 0)] {
        let closed = partial_close(&Diagram::proj(), &[(top, bottom)])?;
        let v = eval(&closed, &reg)?;
        let mut direct = ComplexMatrix::zeros(d, d);
        for r in 0..d {
            for col in 0..d {
                let mut z = Complex64::new(0.0, 0.0);
                for a in 0..d {
                    let row = if bottom == 1 { r * d + a } else { a * d + r };
                    let col_full = if top == 0 { a * d + col } else { col * d + a };
                    z += outer.get(row, col_full);
                }
                direct.set(r, col, z);
            }
        }
        gap = gap.max(v.max_abs_diff(&direct));
        residual = worst([residual, v.max_abs_diff(&target), direct.max_abs_diff(&target)]);
    }
    Ok((residual, gap))
}

/// Closing a ρ-decorated cup over an Oᵀ-decorated cap gives the same circle
/// as the cap-over-cup arrangement.
fn circle_two_ways(d: usize, seed: u64) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?
        .with("rho", random_density(d, seed))?
        .with("O", random_rank1_observable(d, seed))?;
    let (rho, o) = (reg.matrix("rho")?, reg.matrix("O")?);
    let id = ComplexMatrix::identity(d);
    let rho1 = Diagram::op("rho", Flavor::Plain).tensor(&Diagram::identity(1));
    let ot = Diagram::identity(1).tensor(&Diagram::op("O", Flavor::Transpose));
    // tr_CA((ρ ⊗ 1)|Ω⟩⟨Ω|(1 ⊗ Oᵀ))
    let closed = close(&Diagram::chain(&[ot.clone(), Diagram::proj(), rho1.clone()])?)?;
    // ⟨Ω|(1 ⊗ Oᵀ)(ρ ⊗ 1)|Ω⟩
    let circle = Diagram::chain(&[Diagram::ket_cup(), rho1, ot, Diagram::bra_cap()])?;
    let (a, b) = (scalar_of(&closed, &reg)?, scalar_of(&circle, &reg)?);
    let omega = omega_vec(d);
    let lhs_direct = rho
        .kron(&id)
        .matmul(&omega_projector(d))
        .matmul(&id.kron(&o.transpose()))
        .trace();
    let rhs_direct = omega
        .adjoint()
        .matmul(&id.kron(&o.transpose()))
        .matmul(&rho.kron(&id))
        .matmul(&omega)
        .get(0, 0);
    let gap = worst([(a - lhs_direct).norm(), (b - rhs_direct).norm()]);
    Ok((worst([(a - b).norm(), (lhs_direct - rhs_direct).norm()]), gap))
}

/// Two oblique lines closed into one circle: `tr((ρ T_CA)(O T_AC))` equals
/// `d · ⟨Ω|(ρ ⊗ 1)(1 ⊗ Oᵀ)|Ω⟩`.
fn circle_oblique(d: usize, seed: u64) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?
        .with("rho", random_density(d, seed))?
        .with("O", random_rank1_observable(d, seed))?;
    let (rho, o) = (reg.matrix("rho")?, reg.matrix("O")?);
    let id = ComplexMatrix::identity(d);
    let crossing = Diagram::from_parts(
        2,
        2,
        vec![
            Strand::plain(Endpoint::Top(0), Endpoint::Bottom(1)),
            Strand::plain(Endpoint::Top(1), Endpoint::Bottom(0)),
        ],
        vec![],
        c(1.0),
        0,
    )?;
    let obliques = Diagram::op("O", Flavor::Plain)
        .tensor(&Diagram::op("rho", Flavor::Plain))
        .compose(&crossing)?;
    let lhs = scalar_of(&close(&obliques)?, &reg)?;
    let rhs = scalar_of(
        &Diagram::chain(&[
            Diagram::ket_cup(),
            Diagram::identity(1).tensor(&Diagram::op("O", Flavor::Transpose)),
            Diagram::op("rho", Flavor::Plain).tensor(&Diagram::identity(1)),
            Diagram::bra_cap(),
        ])?
        .times_d_power(1),
        &reg,
    )?;
    // direct: the crossing is the swap S, and tr(S (O ⊗ ρ)) = tr(ρ O)
    let mut swap = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            swap.set(j * d + i, i * d + j, c(1.0));
        }
    }
    let lhs_direct = swap.matmul(&o.kron(&rho)).trace();
    let omega = omega_vec(d);
    let rhs_direct = omega
        .adjoint()
        .matmul(&rho.kron(&id))
        .matmul(&id.kron(&o.transpose()))
        .matmul(&omega)
        .get(0, 0)
        * d as f64;
    let gap = worst([(lhs - lhs_direct).norm(), (rhs - rhs_direct).norm()]);
    Ok((worst([(lhs - rhs).norm(), (lhs_direct - rhs_direct).norm()]), gap))
}

/// Zig-zags of a cup and a cap straighten to `(1/d) · 1`.
fn snake(d: usize, left: bool) -> Result<(f64, f64)> {
    let reg = Registry::standard(d)?;
    let id1 = Diagram::identity(1);
    let diagram = if left {
        Diagram::ket_cup()
            .tensor(&id1)
            .compose(&id1.tensor(&Diagram::bra_cap()))?
    } else {
        id1.tensor(&Diagram::ket_cup())
            .compose(&Diagram::bra_cap().tensor(&id1))?
    };
    let id = ComplexMatrix::identity(d);
    let omega = omega_vec(d);
    let direct = if left {
        id.kron(&omega.adjoint()).matmul(&omega.kron(&id))
    } else {
        omega.adjoint().kron(&id).matmul(&id.kron(&omega))
    };
    let target = id.scale(c(1.0 / d as f64));
    let (normal, _) = normalize(&diagram, &reg)?;
    let structural = if normal.approx_eq(&Diagram::identity(1).scaled(c(1.0 / d as f64)), 1e-12) {
        0.0
    } else {
        f64::INFINITY
    };
    let v = eval(&diagram, &reg)?;
    Ok((
        worst([structural, v.max_abs_diff(&target), direct.max_abs_diff(&target)]),
        v.max_abs_diff(&direct),
    ))
}
