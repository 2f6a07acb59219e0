//! Value-preserving rewrites: sliding decorations across bends, fusing
//! neighbouring decorations, straightening zig-zags, eliminating loops, and
//! closing boundary points into traces. `normalize` drives them to a
//! canonical form and records a replayable trace.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::diagram::{rethread, Bead, Decoration, Diagram, Endpoint, Flavor, Loop, Node, Piece, Strand};
use crate::error::{Error, Result};
use crate::numeric::{d_pow, ComplexMatrix};
use crate::registry::Registry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Site {
    Strand(usize),
    Loop(usize),
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Strand(i) => write!(f, "strand {i}"),
            Site::Loop(i) => write!(f, "loop {i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    TowardStart,
    TowardEnd,
}

/// One rewrite with its target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Step {
    Slide {
        site: Site,
        index: usize,
        direction: Direction,
    },
    Fuse {
        site: Site,
        index: usize,
    },
    Straighten {
        site: Site,
        index: usize,
    },
    LoopEliminate {
        index: usize,
    },
    /// Fold `d^k` into the scalar.
    Absorb,
    /// Replace a flavored derived label by a plain one bound to its value.
    Relabel {
        site: Site,
        index: usize,
    },
    /// Swap a decoration on a strand returning to its own terminal for the
    /// transpose, which has the same value.
    Reflect {
        index: usize,
    },
    Close,
    PartialClose {
        pairs: Vec<(usize, usize)>,
    },
}

impl Step {
    pub fn rule_id(&self) -> &'static str {
        match self {
            Step::Slide { .. } => "slide",
            Step::Fuse { .. } => "fuse",
            Step::Straighten { .. } => "straighten",
            Step::LoopEliminate { .. } => "loop_eliminate",
            Step::Absorb => "absorb",
            Step::Relabel { .. } => "relabel",
            Step::Reflect { .. } => "reflect",
            Step::Close => "close",
            Step::PartialClose { .. } => "partial_close",
        }
    }

    pub fn apply(&self, d: &Diagram, reg: &Registry) -> Result<Diagram> {
        match self {
            Step::Slide {
                site,
                index,
                direction,
            } => slide(d, *site, *index, *direction),
            Step::Fuse { site, index } => fuse(d, *site, *index, reg),
            Step::Straighten { site, index } => straighten(d, *site, *index),
            Step::LoopEliminate { index } => loop_eliminate_at(d, *index, reg),
            Step::Absorb => Ok(absorb(d, reg.dim())),
            Step::Relabel { site, index } => relabel(d, *site, *index, reg),
            Step::Reflect { index } => reflect(d, *index, reg),
            Step::Close => close(d),
            Step::PartialClose { pairs } => partial_close(d, pairs),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RewriteStep {
    pub step: Step,
    pub before_hash: String,
    pub after_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RewriteTrace {
    pub initial: Diagram,
    pub steps: Vec<RewriteStep>,
    pub result: Diagram,
}

impl RewriteTrace {
    /// Re-apply every step to the initial diagram, checking the recorded
    /// digests along the way.
    pub fn replay(&self, reg: &Registry) -> Result<Diagram> {
        let mut cur = self.initial.clone();
        for (i, s) in self.steps.iter().enumerate() {
            if cur.digest() != s.before_hash {
                return Err(Error::InvalidDiagram(format!("replay diverged before step {i}")));
            }
            cur = s.step.apply(&cur, reg)?;
            if cur.digest() != s.after_hash {
                return Err(Error::InvalidDiagram(format!("replay diverged after step {i}")));
            }
        }
        Ok(cur)
    }
}

fn word_of(d: &Diagram, site: Site) -> Result<&[Bead]> {
    match site {
        Site::Strand(i) => d.strands().get(i).map(|s| s.word.as_slice()),
        Site::Loop(i) => d.loops().get(i).map(|l| l.word.as_slice()),
    }
    .ok_or_else(|| Error::InvalidSite(site.to_string()))
}

fn with_word(d: &Diagram, site: Site, word: Vec<Bead>) -> Diagram {
    let mut strands = d.strands().to_vec();
    let mut loops = d.loops().to_vec();
    match site {
        Site::Strand(i) => strands[i].word = word,
        Site::Loop(i) => loops[i] = Loop::new(word),
    }
    d.replace_parts(strands, loops, d.scalar_factor(), d.d_power())
}

/// Flows at each position of the word at `site`.
fn flows_of(d: &Diagram, site: Site) -> Vec<bool> {
    match site {
        Site::Strand(i) => d.strands()[i].flows(),
        Site::Loop(i) => d.loops()[i].flows(),
    }
}

/// Position of the neighbour of `index`, wrapping around on loops.
fn neighbour(site: Site, len: usize, index: usize, dir: Direction) -> Option<usize> {
    let cyclic = matches!(site, Site::Loop(_)) && len >= 2;
    match dir {
        Direction::TowardStart if index > 0 => Some(index - 1),
        Direction::TowardStart if cyclic => Some(len - 1),
        Direction::TowardEnd if index + 1 < len => Some(index + 1),
        Direction::TowardEnd if cyclic => Some(0),
        _ => None,
    }
}

fn op_at(word: &[Bead], index: usize) -> Result<&Decoration> {
    match word.get(index) {
        Some(Bead::Op(dec)) => Ok(dec),
        Some(_) => Err(Error::InvalidPosition {
            position: index,
            reason: "bead is a bend, not a decoration".into(),
        }),
        None => Err(Error::InvalidPosition {
            position: index,
            reason: format!("word has length {}", word.len()),
        }),
    }
}

/// Move the decoration at `index` across the neighbouring bend, toggling
/// its transpose.
pub fn slide(d: &Diagram, site: Site, index: usize, dir: Direction) -> Result<Diagram> {
    let word = word_of(d, site)?;
    let dec = op_at(word, index)?.clone();
    let j = neighbour(site, word.len(), index, dir).ok_or(Error::NoBend)?;
    if !word[j].is_bend() {
        return Err(Error::NoBend);
    }
    let mut w = word.to_vec();
    w[j] = Bead::Op(Decoration::new(dec.label, dec.flavor.toggle_transpose()));
    w[index] = word[j].clone();
    Ok(with_word(d, site, w))
}

/// Replace the decorations at `index` and its successor by one derived
/// decoration bound to their product taken along the flow.
pub fn fuse(d: &Diagram, site: Site, index: usize, reg: &Registry) -> Result<Diagram> {
    let word = word_of(d, site)?;
    let a = op_at(word, index)?;
    let j = neighbour(site, word.len(), index, Direction::TowardEnd).ok_or(Error::InvalidPosition {
        position: index,
        reason: "no following decoration".into(),
    })?;
    if j == index {
        return Err(Error::InvalidPosition {
            position: index,
            reason: "cannot fuse a decoration with itself".into(),
        });
    }
    let b = op_at(word, j)?;
    let ma = reg.flavored(&a.label, a.flavor)?;
    let mb = reg.flavored(&b.label, b.flavor)?;
    let with = flows_of(d, site)[index];
    let product = if with { mb.matmul(&ma) } else { ma.matmul(&mb) };
    let label = reg.derive(&product)?;
    let mut w = word.to_vec();
    w[index] = Bead::Op(Decoration::plain(label));
    w.remove(j);
    Ok(with_word(d, site, w))
}

/// Remove the adjacent bends at `index` and its successor.
pub fn straighten(d: &Diagram, site: Site, index: usize) -> Result<Diagram> {
    let word = word_of(d, site)?;
    let j = neighbour(site, word.len(), index, Direction::TowardEnd).ok_or(Error::NoBend)?;
    if j == index || !word[index].is_bend() || !word[j].is_bend() {
        return Err(Error::NoBend);
    }
    let flows = flows_of(d, site);
    let mut w: Vec<Bead> = word
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != index && *k != j)
        .map(|(_, b)| b.clone())
        .collect();
    if let Site::Loop(_) = site {
        // a loop losing its last bends must run along its flow
        let any_op = word.iter().position(|b| !b.is_bend());
        if !w.iter().any(Bead::is_bend) {
            if let Some(k) = any_op {
                if !flows[k] {
                    w.reverse();
                }
            }
        }
    }
    Ok(with_word(d, site, w))
}

/// Remove loop `index`, multiplying the scalar by `tr(W)/d`.
pub fn loop_eliminate_at(d: &Diagram, index: usize, reg: &Registry) -> Result<Diagram> {
    let l = d
        .loops()
        .get(index)
        .ok_or_else(|| Error::InvalidSite(Site::Loop(index).to_string()))?;
    let value = loop_value(l, reg)?;
    let mut loops = d.loops().to_vec();
    loops.remove(index);
    Ok(d.replace_parts(d.strands().to_vec(), loops, d.scalar_factor() * value, d.d_power()))
}

/// Remove every loop.
pub fn loop_eliminate(d: &Diagram, reg: &Registry) -> Result<Diagram> {
    let mut cur = d.clone();
    while !cur.loops().is_empty() {
        cur = loop_eliminate_at(&cur, 0, reg)?;
    }
    Ok(cur)
}

/// `tr(W)/d` for the flavored cyclic product around a loop.
pub fn loop_value(l: &Loop, reg: &Registry) -> Result<Complex64> {
    let dim = reg.dim();
    let mut w = ComplexMatrix::identity(dim);
    for (bead, with) in l.word.iter().zip(l.flows()) {
        if let Bead::Op(dec) = bead {
            let m = reg.flavored(&dec.label, dec.flavor)?;
            w = if with { m } else { m.transpose() }.matmul(&w);
        }
    }
    Ok(w.trace() / dim as f64)
}

/// Fold the power of `d` into the scalar.
pub fn absorb(d: &Diagram, dim: usize) -> Diagram {
    d.replace_parts(
        d.strands().to_vec(),
        d.loops().to_vec(),
        d.scalar_factor() * d_pow(dim, d.d_power()),
        0,
    )
}

/// Rebind a flavored derived decoration as a plain derived decoration of
/// the same value.
pub fn relabel(d: &Diagram, site: Site, index: usize, reg: &Registry) -> Result<Diagram> {
    let word = word_of(d, site)?;
    let dec = op_at(word, index)?;
    let label = reg.derive(&reg.flavored(&dec.label, dec.flavor)?)?;
    let mut w = word.to_vec();
    w[index] = Bead::Op(Decoration::plain(label));
    Ok(with_word(d, site, w))
}

/// Label the decoration of `[M, bend]` on a strand whose two ends are the same
/// terminal would carry after sliding across the bend: a plain `Mᵀ`.
fn reflected_label(d: &Diagram, index: usize, reg: &Registry) -> Result<String> {
    let s = d
        .strands()
        .get(index)
        .ok_or_else(|| Error::InvalidSite(Site::Strand(index).to_string()))?;
    match s.word.as_slice() {
        [Bead::Op(dec), bend] if bend.is_bend() && s.start == s.end => {
            reg.derive(&reg.flavored(&dec.label, dec.flavor)?.transpose())
        }
        _ => Err(Error::InvalidPosition {
            position: 0,
            reason: "reflect needs a strand [decoration, bend] between equal terminals".into(),
        }),
    }
}

/// Replace `M` by `Mᵀ` on a strand `[M, bend]` joining a terminal to itself.
pub fn reflect(d: &Diagram, index: usize, reg: &Registry) -> Result<Diagram> {
    let label = reflected_label(d, index, reg)?;
    let mut w = d.strands()[index].word.clone();
    w[0] = Bead::Op(Decoration::plain(label));
    Ok(with_word(d, Site::Strand(index), w))
}

/// Join every top point to the bottom point of the same index, giving the
/// trace of the diagram's value.
pub fn close(d: &Diagram) -> Result<Diagram> {
    if d.upper_arity() != d.lower_arity() {
        return Err(Error::ArityMismatch {
            first: d.arities(),
            second: (d.lower_arity(), d.upper_arity()),
        });
    }
    if d.has_terminals() {
        return Err(Error::TerminalPresent);
    }
    let pairs: Vec<(usize, usize)> = (0..d.upper_arity()).map(|i| (i, i)).collect();
    partial_close(d, &pairs)
}

/// Join each listed top point to its bottom partner with an undecorated
/// wire; the remaining boundary points keep their relative order.
pub fn partial_close(d: &Diagram, pairs: &[(usize, usize)]) -> Result<Diagram> {
    let (u, l) = d.arities();
    let mut top = vec![None; u];
    let mut bottom = vec![None; l];
    for (k, &(t, b)) in pairs.iter().enumerate() {
        if t >= u {
            return Err(Error::IndexOutOfRange { index: t, bound: u });
        }
        if b >= l {
            return Err(Error::IndexOutOfRange { index: b, bound: l });
        }
        if top[t].is_some() {
            return Err(Error::DuplicateIndex(t));
        }
        if bottom[b].is_some() {
            return Err(Error::DuplicateIndex(b));
        }
        top[t] = Some(2 * k + 1);
        bottom[b] = Some(2 * k);
    }
    let rank = |marks: &[Option<usize>], i: usize| marks[..i].iter().filter(|m| m.is_none()).count();
    let map = |e: &Endpoint| match e {
        Endpoint::Top(i) => match top[*i] {
            Some(g) => Node::Glue(g),
            None => Node::Outer(Endpoint::Top(rank(&top, *i))),
        },
        Endpoint::Bottom(j) => match bottom[*j] {
            Some(g) => Node::Glue(g),
            None => Node::Outer(Endpoint::Bottom(rank(&bottom, *j))),
        },
        other => Node::Outer(other.clone()),
    };
    let mut pieces: Vec<Piece> = d.strands().iter().map(|s| Piece::from_strand(s, map)).collect();
    pieces.extend((0..pairs.len()).map(|k| Piece::wire(2 * k, 2 * k + 1)));
    let threaded = rethread(pieces);
    let loops = d.loops().iter().cloned().chain(threaded.loops).collect::<Vec<_>>();
    let closed = Diagram::from_parts(
        u - pairs.len(),
        l - pairs.len(),
        threaded.strands,
        loops,
        d.scalar_factor(),
        d.d_power() + threaded.d_power_delta,
    )?;
    Ok(closed)
}

/// Every step addressing an existing site, whether or not it applies there.
pub fn candidate_steps(d: &Diagram) -> Vec<Step> {
    let mut out = Vec::new();
    let sites = (0..d.strands().len())
        .map(|i| (Site::Strand(i), d.strands()[i].word.len()))
        .chain((0..d.loops().len()).map(|i| (Site::Loop(i), d.loops()[i].word.len())));
    for (site, len) in sites {
        for index in 0..len {
            for direction in [Direction::TowardStart, Direction::TowardEnd] {
                out.push(Step::Slide {
                    site,
                    index,
                    direction,
                });
            }
            out.push(Step::Fuse { site, index });
            out.push(Step::Straighten { site, index });
            out.push(Step::Relabel { site, index });
        }
    }
    out.extend((0..d.loops().len()).map(|index| Step::LoopEliminate { index }));
    out.extend((0..d.strands().len()).map(|index| Step::Reflect { index }));
    out.push(Step::Absorb);
    out
}

/// Every step `normalize` may take next, in its preferred order.
///
/// Reflections are pending when they lead to a smaller label, so of the two
/// equivalent forms of a self-joined terminal strand the smaller one is normal.
pub fn pending_steps(d: &Diagram, reg: &Registry) -> Vec<Step> {
    let mut out = Vec::new();
    let strands: Vec<(usize, &Strand)> = d.strands().iter().enumerate().collect();
    for &(i, s) in &strands {
        for k in 1..s.word.len() {
            if !s.word[k].is_bend() && s.word[k - 1].is_bend() {
                out.push(Step::Slide {
                    site: Site::Strand(i),
                    index: k,
                    direction: Direction::TowardStart,
                });
            }
        }
    }
    for &(i, s) in &strands {
        for k in 1..s.word.len() {
            if s.word[k].is_bend() && s.word[k - 1].is_bend() {
                out.push(Step::Straighten {
                    site: Site::Strand(i),
                    index: k - 1,
                });
            }
        }
    }
    for &(i, s) in &strands {
        for k in 1..s.word.len() {
            if !s.word[k].is_bend() && !s.word[k - 1].is_bend() {
                out.push(Step::Fuse {
                    site: Site::Strand(i),
                    index: k - 1,
                });
            }
        }
    }
    out.extend((0..d.loops().len()).map(|index| Step::LoopEliminate { index }));
    if d.d_power() != 0 {
        out.push(Step::Absorb);
    }
    for &(i, s) in &strands {
        for (k, b) in s.word.iter().enumerate() {
            if let Bead::Op(dec) = b {
                if dec.flavor != Flavor::Plain && Registry::is_derived(&dec.label) {
                    out.push(Step::Relabel {
                        site: Site::Strand(i),
                        index: k,
                    });
                }
            }
        }
    }
    if out.is_empty() {
        for &(i, s) in &strands {
            if let (Ok(label), Some(Bead::Op(dec))) = (reflected_label(d, i, reg), s.word.first()) {
                if dec.flavor != Flavor::Plain || label < dec.label {
                    out.push(Step::Reflect { index: i });
                }
            }
        }
    }
    out
}

/// Canonical form: decorations slid to the start of each strand, zig-zags
/// straightened, each strand's decorations fused into one, loops and powers
/// of `d` folded into the scalar.
pub fn normalize(d: &Diagram, reg: &Registry) -> Result<(Diagram, RewriteTrace)> {
    normalize_by(d, reg, |_| 0)
}

/// [`normalize`] with a caller-chosen step at every point.
pub fn normalize_by(
    d: &Diagram,
    reg: &Registry,
    mut choose: impl FnMut(&[Step]) -> usize,
) -> Result<(Diagram, RewriteTrace)> {
    let mut cur = d.clone();
    let mut steps = Vec::new();
    loop {
        let pending = pending_steps(&cur, reg);
        if pending.is_empty() {
            break;
        }
        let step = pending[choose(&pending) % pending.len()].clone();
        let next = step.apply(&cur, reg)?;
        steps.push(RewriteStep {
            step,
            before_hash: cur.digest(),
            after_hash: next.digest(),
        });
        cur = next;
    }
    let trace = RewriteTrace {
        initial: d.clone(),
        steps,
        result: cur.clone(),
    };
    Ok((cur, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{evaluate, random_matrix, random_unitary};

    fn reg3() -> Registry {
        Registry::standard(3)
            .unwrap()
            .with("M", random_matrix(3, 1))
            .unwrap()
            .with("N", random_matrix(3, 2))
            .unwrap()
    }

    fn close_to(a: &Diagram, b: &Diagram, r: &Registry) -> bool {
        evaluate(a, r.dim(), r)
            .unwrap()
            .approx_eq(&evaluate(b, r.dim(), r).unwrap(), 1e-10)
    }

    #[test]
    fn slide_on_cup_transposes() {
        let r = reg3();
        let cup = Diagram::ket_cup().decorate_leg(0, true, "M", Flavor::Plain).unwrap();
        let slid = slide(&cup, Site::Strand(0), 0, Direction::TowardEnd).unwrap();
        assert_eq!(
            slid.strands()[0].word,
            vec![Bead::Cup, Bead::op("M", Flavor::Transpose)]
        );
        assert!(close_to(&cup, &slid, &r));
        let back = slide(&slid, Site::Strand(0), 1, Direction::TowardStart).unwrap();
        assert_eq!(back, cup);
    }

    #[test]
    fn slide_on_cap_adjoint_to_conjugate() {
        let r = reg3();
        let cap = Diagram::bra_cap().decorate_leg(0, true, "N", Flavor::Adjoint).unwrap();
        let slid = slide(&cap, Site::Strand(0), 0, Direction::TowardEnd).unwrap();
        assert_eq!(
            slid.strands()[0].word,
            vec![Bead::Cap, Bead::op("N", Flavor::Conjugate)]
        );
        assert!(close_to(&cap, &slid, &r));
    }

    #[test]
    fn slide_needs_a_bend() {
        let d = Diagram::op("M", Flavor::Plain);
        assert_eq!(
            slide(&d, Site::Strand(0), 0, Direction::TowardEnd),
            Err(Error::NoBend)
        );
        assert!(matches!(
            slide(&d, Site::Strand(4), 0, Direction::TowardEnd),
            Err(Error::InvalidSite(_))
        ));
        let cup = Diagram::ket_cup();
        assert!(matches!(
            slide(&cup, Site::Strand(0), 0, Direction::TowardEnd),
            Err(Error::InvalidPosition { .. })
        ));
    }

    #[test]
    fn fuse_collects_products() {
        let r = reg3();
        let d = Diagram::chain(&[
            Diagram::op("M", Flavor::Plain),
            Diagram::op("N", Flavor::Conjugate),
            Diagram::op("M", Flavor::Transpose),
        ])
        .unwrap();
        let f = fuse(&d, Site::Strand(0), 0, &r).unwrap();
        let f = fuse(&f, Site::Strand(0), 0, &r).unwrap();
        assert_eq!(f.decoration_count(), 1);
        assert!(close_to(&d, &f, &r));
        let m = r.matrix("M").unwrap();
        let n = r.matrix("N").unwrap();
        let expect = m.transpose().matmul(&n.conj()).matmul(&m);
        let label = &f.strands()[0].decorations().next().unwrap().label;
        assert!(r.matrix(label).unwrap().approx_eq(&expect, 1e-12));
    }

    #[test]
    fn fuse_against_flow() {
        let r = reg3();
        let cup = Diagram::ket_cup()
            .decorate(0, 0, "M", Flavor::Plain)
            .unwrap()
            .decorate(0, 0, "N", Flavor::Adjoint)
            .unwrap();
        let f = fuse(&cup, Site::Strand(0), 0, &r).unwrap();
        assert!(close_to(&cup, &f, &r));
    }

    #[test]
    fn fuse_with_identity_is_relabeling() {
        let r = reg3();
        let d = Diagram::op("M", Flavor::Plain)
            .compose(&Diagram::op("1", Flavor::Plain))
            .unwrap();
        let f = fuse(&d, Site::Strand(0), 0, &r).unwrap();
        let label = &f.strands()[0].decorations().next().unwrap().label;
        assert_eq!(r.matrix(label).unwrap(), r.matrix("M").unwrap());
    }

    #[test]
    fn unresolved_fuse() {
        let r = reg3();
        let d = Diagram::op("M", Flavor::Plain)
            .compose(&Diagram::op("Q", Flavor::Plain))
            .unwrap();
        assert_eq!(
            fuse(&d, Site::Strand(0), 0, &r),
            Err(Error::UnresolvedLabel("Q".into()))
        );
    }

    #[test]
    fn loop_values() {
        let r = reg3();
        let plain = Diagram::ket_cup().compose(&Diagram::bra_cap()).unwrap();
        let e = loop_eliminate(&plain, &r).unwrap();
        assert!(e.loops().is_empty());
        assert!((e.scalar_factor() - Complex64::new(1.0, 0.0)).norm() < 1e-12);

        let dec = Diagram::ket_cup()
            .decorate_leg(0, true, "M", Flavor::Plain)
            .unwrap()
            .compose(&Diagram::bra_cap().decorate_leg(0, true, "N", Flavor::Adjoint).unwrap())
            .unwrap();
        let e = loop_eliminate(&dec, &r).unwrap();
        let m = r.matrix("M").unwrap();
        let n = r.matrix("N").unwrap();
        let expect = m.matmul(&n.adjoint()).trace() / 3.0;
        assert!((e.scalar_factor() - expect).norm() < 1e-12);
        assert!(close_to(&dec, &e, &r));
    }

    #[test]
    fn straighten_snake() {
        let r = reg3();
        let snake = Diagram::ket_cup()
            .tensor(&Diagram::identity(1))
            .compose(&Diagram::identity(1).tensor(&Diagram::bra_cap()))
            .unwrap();
        assert_eq!(snake.arities(), (1, 1));
        assert_eq!(snake.strands()[0].word.len(), 2);
        let s = straighten(&snake, Site::Strand(0), 0).unwrap();
        assert!(s.strands()[0].word.is_empty());
        assert!(close_to(&snake, &s, &r));
    }

    #[test]
    fn close_identity_is_d() {
        let r = reg3();
        let c = close(&Diagram::identity(1)).unwrap();
        assert_eq!(c.arities(), (0, 0));
        let v = evaluate(&c, 3, &r).unwrap();
        assert!((v.get(0, 0) - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert!(matches!(close(&Diagram::ket_cup()), Err(Error::ArityMismatch { .. })));
        assert_eq!(
            close(&Diagram::ket("a").compose(&Diagram::bra("b")).unwrap()),
            Err(Error::TerminalPresent)
        );
    }

    #[test]
    fn close_is_trace() {
        let r = reg3();
        let d = Diagram::proj()
            .decorate(0, 0, "M", Flavor::Plain)
            .unwrap()
            .compose(&Diagram::op("N", Flavor::Plain).tensor(&Diagram::identity(1)))
            .unwrap();
        let trace = evaluate(&d, 3, &r).unwrap().trace();
        let c = evaluate(&close(&d).unwrap(), 3, &r).unwrap().get(0, 0);
        assert!((trace - c).norm() < 1e-12);
    }

    #[test]
    fn partial_close_projector() {
        let r = reg3();
        let p = partial_close(&Diagram::proj(), &[(1, 1)]).unwrap();
        assert_eq!(p.arities(), (1, 1));
        let v = evaluate(&p, 3, &r).unwrap();
        assert!(v.approx_eq(&ComplexMatrix::identity(3).scale(Complex64::new(1.0 / 3.0, 0.0)), 1e-12));
        assert_eq!(
            partial_close(&Diagram::proj(), &[(1, 1), (1, 0)]),
            Err(Error::DuplicateIndex(1))
        );
        assert!(matches!(
            partial_close(&Diagram::proj(), &[(2, 0)]),
            Err(Error::IndexOutOfRange { index: 2, bound: 2 })
        ));
    }

    #[test]
    fn normalize_loop_is_scalar_one() {
        let r = reg3();
        let (n, trace) = normalize(&Diagram::ket_cup().compose(&Diagram::bra_cap()).unwrap(), &r).unwrap();
        assert!(n.approx_eq(&Diagram::identity(0), 1e-12));
        assert_eq!(trace.replay(&r).unwrap(), n);
    }

    #[test]
    fn normalize_cup_fusion() {
        let r = reg3();
        let top = Diagram::ket_cup().tensor(&Diagram::ket_cup());
        let mid = Diagram::tensor_all([&Diagram::identity(1), &Diagram::bra_cap(), &Diagram::identity(1)]);
        let (n, _) = normalize(&top.compose(&mid).unwrap(), &r).unwrap();
        let expect = Diagram::ket_cup().scaled(Complex64::new(1.0 / 3.0, 0.0));
        assert!(n.approx_eq(&expect, 1e-12));
    }

    #[test]
    fn normalize_is_idempotent_and_sound() {
        let u = random_unitary(3, 9);
        let r = reg3().with("V", u).unwrap();
        let d = Diagram::proj()
            .decorate(0, 1, "M", Flavor::Plain)
            .unwrap()
            .decorate(1, 0, "V", Flavor::Adjoint)
            .unwrap()
            .compose(&Diagram::op("N", Flavor::Transpose).tensor(&Diagram::identity(1)))
            .unwrap()
            .compose(&Diagram::proj())
            .unwrap();
        let (n, trace) = normalize(&d, &r).unwrap();
        assert!(close_to(&d, &n, &r));
        let (n2, t2) = normalize(&n, &r).unwrap();
        assert_eq!(n2, n);
        assert!(t2.steps.is_empty());
        assert_eq!(trace.replay(&r).unwrap(), n);
        for s in n.strands() {
            assert!(s.decorations().count() <= 1);
        }
    }

    #[test]
    fn reflect_self_joined_terminal_strand() {
        let r = reg3().with_vector("u", crate::numeric::random_state(3, 9)).unwrap();
        let x = Diagram::ket("u")
            .tensor(&Diagram::ket("u"))
            .compose(&Diagram::op("M", Flavor::Plain).tensor(&Diagram::identity(1)))
            .unwrap()
            .compose(&Diagram::bra_cap())
            .unwrap();
        let y = reflect(&x, 0, &r).unwrap();
        assert!(close_to(&x, &y, &r));
        assert!(reflect(&Diagram::ket_cup(), 0, &r).is_err());
        let (n, _) = normalize(&x, &r).unwrap();
        let (m, _) = normalize(&y, &r).unwrap();
        assert_eq!(n, m);
    }
}
