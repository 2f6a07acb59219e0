//! The diagram IR: decorated matchings of boundary points.
//!
//! Every strand joins two endpoints. Its `word` lists, from the start endpoint
//! to the end endpoint, the decorations it carries and the bends (cups and
//! caps) it passes through. A decoration's flavor is stated relative to the
//! local flow of its segment, which is how the operator would be drawn: on a
//! cup's legs flow runs from the bend down to the boundary, on a cap's legs
//! from the boundary up into the bend, on straight lines from top to bottom.
//!
//! Normalization factors are not attached to bends. A strand whose endpoints
//! are both sources (top points, kets) or both sinks (bottom points, bras)
//! evaluates with a single `1/√d`; every closed loop evaluates to `tr(W)/d`.
//! Any further powers of `d` produced by composition live in
//! [`Diagram::d_power`].

mod sum;
mod thread;

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use sum::DiagramSum;
pub(crate) use thread::{rethread, Node, Piece};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Endpoint {
    Top(usize),
    Bottom(usize),
    Ket(String),
    Bra(String),
}

impl Endpoint {
    /// True where flow enters a strand: top boundary points and kets.
    pub fn is_source(&self) -> bool {
        matches!(self, Endpoint::Top(_) | Endpoint::Ket(_))
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Endpoint::Ket(_) | Endpoint::Bra(_))
    }

    pub fn flipped(&self) -> Endpoint {
        match self {
            Endpoint::Top(i) => Endpoint::Bottom(*i),
            Endpoint::Bottom(i) => Endpoint::Top(*i),
            Endpoint::Ket(l) => Endpoint::Bra(l.clone()),
            Endpoint::Bra(l) => Endpoint::Ket(l.clone()),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Top(i) => write!(f, "T{i}"),
            Endpoint::Bottom(i) => write!(f, "B{i}"),
            Endpoint::Ket(l) => write!(f, "ket({l})"),
            Endpoint::Bra(l) => write!(f, "bra({l})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Plain,
    Adjoint,
    Transpose,
    Conjugate,
}

impl Flavor {
    /// The flavor after sliding across a bend: plain↔transpose, adjoint↔conjugate.
    pub fn toggle_transpose(self) -> Flavor {
        match self {
            Flavor::Plain => Flavor::Transpose,
            Flavor::Transpose => Flavor::Plain,
            Flavor::Adjoint => Flavor::Conjugate,
            Flavor::Conjugate => Flavor::Adjoint,
        }
    }

    /// The flavor under the dagger: plain↔adjoint, transpose↔conjugate.
    pub fn dagger(self) -> Flavor {
        match self {
            Flavor::Plain => Flavor::Adjoint,
            Flavor::Adjoint => Flavor::Plain,
            Flavor::Transpose => Flavor::Conjugate,
            Flavor::Conjugate => Flavor::Transpose,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Flavor::Plain => "plain",
            Flavor::Adjoint => "dag",
            Flavor::Transpose => "T",
            Flavor::Conjugate => "conj",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Decoration {
    pub label: String,
    pub flavor: Flavor,
}

impl Decoration {
    pub fn new(label: impl Into<String>, flavor: Flavor) -> Self {
        Decoration {
            label: label.into(),
            flavor,
        }
    }

    pub fn plain(label: impl Into<String>) -> Self {
        Decoration::new(label, Flavor::Plain)
    }
}

/// One item along a strand or loop.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bead {
    Op(Decoration),
    /// Flow emanates from here in both directions.
    Cup,
    /// Flow runs into here from both directions.
    Cap,
}

impl Bead {
    pub fn op(label: impl Into<String>, flavor: Flavor) -> Bead {
        Bead::Op(Decoration::new(label, flavor))
    }

    pub fn is_bend(&self) -> bool {
        matches!(self, Bead::Cup | Bead::Cap)
    }

    pub fn decoration(&self) -> Option<&Decoration> {
        match self {
            Bead::Op(dec) => Some(dec),
            _ => None,
        }
    }

    fn daggered(&self) -> Bead {
        match self {
            Bead::Op(dec) => Bead::Op(Decoration::new(dec.label.clone(), dec.flavor.dagger())),
            Bead::Cup => Bead::Cap,
            Bead::Cap => Bead::Cup,
        }
    }
}

/// Number of (bend, later op) pairs in a word.
fn bends_before_ops(word: &[Bead]) -> usize {
    let mut bends = 0;
    let mut total = 0;
    for b in word {
        if b.is_bend() {
            bends += 1;
        } else {
            total += bends;
        }
    }
    total
}

/// Flow direction of every bead position of a strand word relative to the
/// traversal direction (`true` = flow runs from start toward end).
///
/// For bends the value is the flow on the segment just before the bend.
pub(crate) fn word_flows(first_with: bool, word: &[Bead]) -> std::result::Result<(Vec<bool>, bool), String> {
    let mut with = first_with;
    let mut flows = Vec::with_capacity(word.len());
    for (i, bead) in word.iter().enumerate() {
        flows.push(with);
        match bead {
            Bead::Op(_) => {}
            Bead::Cup => {
                if with {
                    return Err(format!("cup at word position {i} is entered along the flow"));
                }
                with = true;
            }
            Bead::Cap => {
                if !with {
                    return Err(format!("cap at word position {i} is entered against the flow"));
                }
                with = false;
            }
        }
    }
    Ok((flows, with))
}

/// Flow at position 0 of a loop word: set by the last bend, or along the
/// traversal for bend-free loops.
pub(crate) fn loop_first_flow(word: &[Bead]) -> bool {
    match word.iter().rev().find(|b| b.is_bend()) {
        Some(Bead::Cup) => true,
        Some(_) => false,
        None => true,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Strand {
    pub start: Endpoint,
    pub end: Endpoint,
    pub word: Vec<Bead>,
}

impl Strand {
    pub fn new(start: Endpoint, end: Endpoint, word: Vec<Bead>) -> Self {
        Strand { start, end, word }
    }

    pub fn plain(start: Endpoint, end: Endpoint) -> Self {
        Strand::new(start, end, Vec::new())
    }

    /// Both endpoints are sources or both are sinks, so the strand bends an
    /// odd number of times and carries one `1/√d`.
    pub fn is_bent(&self) -> bool {
        self.start.is_source() == self.end.is_source()
    }

    pub fn is_cup(&self) -> bool {
        matches!((&self.start, &self.end), (Endpoint::Bottom(_), Endpoint::Bottom(_)))
    }

    pub fn is_cap(&self) -> bool {
        matches!((&self.start, &self.end), (Endpoint::Top(_), Endpoint::Top(_)))
    }

    pub fn decorations(&self) -> impl Iterator<Item = &Decoration> {
        self.word.iter().filter_map(Bead::decoration)
    }

    /// Per-bead flow relative to start→end traversal.
    pub fn flows(&self) -> Vec<bool> {
        word_flows(self.start.is_source(), &self.word)
            .map(|(f, _)| f)
            .expect("strand word validated on construction")
    }

    pub(crate) fn validate(&self) -> std::result::Result<(), String> {
        let (_, last) = word_flows(self.start.is_source(), &self.word)?;
        if last == self.end.is_source() {
            return Err(format!(
                "strand {}–{} ends against its flow",
                self.start, self.end
            ));
        }
        Ok(())
    }

    pub fn reversed(&self) -> Strand {
        let mut word = self.word.clone();
        word.reverse();
        Strand::new(self.end.clone(), self.start.clone(), word)
    }

    /// Orient the strand so that it starts at its smaller endpoint. Strands
    /// returning to the same terminal prefer decorations near the start.
    pub(crate) fn canonical(self) -> Strand {
        match self.start.cmp(&self.end) {
            Ordering::Greater => self.reversed(),
            Ordering::Less => self,
            Ordering::Equal => {
                let rev = self.reversed();
                if (bends_before_ops(&rev.word), &rev.word) < (bends_before_ops(&self.word), &self.word) {
                    rev
                } else {
                    self
                }
            }
        }
    }

    fn daggered(&self) -> Strand {
        let word = self.word.iter().map(Bead::daggered).collect();
        Strand::new(self.start.flipped(), self.end.flipped(), word)
    }
}

/// A closed strand. Bend-free loops are stored with the word running along
/// the flow.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Loop {
    pub word: Vec<Bead>,
}

impl Loop {
    pub fn new(word: Vec<Bead>) -> Self {
        Loop { word }
    }

    pub fn has_bends(&self) -> bool {
        self.word.iter().any(Bead::is_bend)
    }

    pub fn flows(&self) -> Vec<bool> {
        word_flows(loop_first_flow(&self.word), &self.word)
            .map(|(f, _)| f)
            .expect("loop word validated on construction")
    }

    pub(crate) fn validate(&self) -> std::result::Result<(), String> {
        let first = loop_first_flow(&self.word);
        let (_, last) = word_flows(first, &self.word)?;
        if last != first {
            return Err("loop flow does not close up".into());
        }
        Ok(())
    }

    /// Smallest rotation (and, when the loop bends, reflection) of the word.
    pub(crate) fn canonical(self) -> Loop {
        let n = self.word.len();
        if n == 0 {
            return self;
        }
        let mut candidates: Vec<Vec<Bead>> = Vec::new();
        let mut words = vec![self.word.clone()];
        if self.has_bends() {
            let mut rev = self.word.clone();
            rev.reverse();
            words.push(rev);
        }
        for w in &words {
            for k in 0..n {
                let mut r = w.clone();
                r.rotate_left(k);
                candidates.push(r);
            }
        }
        Loop::new(candidates.into_iter().min().expect("non-empty"))
    }

    fn daggered(&self) -> Loop {
        let mut word: Vec<Bead> = self.word.iter().map(Bead::daggered).collect();
        if !self.has_bends() {
            word.reverse();
        }
        Loop::new(word)
    }
}

/// A decorated matching diagram from `upper` top points to `lower` bottom
/// points, times `scalar · d^d_power`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagram {
    upper: usize,
    lower: usize,
    strands: Vec<Strand>,
    loops: Vec<Loop>,
    scalar: Complex64,
    d_power: i32,
}

impl Diagram {
    /// Build a diagram from raw parts, checking boundary coverage and that
    /// every word is consistent with its endpoints.
    pub fn from_parts(
        upper: usize,
        lower: usize,
        strands: Vec<Strand>,
        loops: Vec<Loop>,
        scalar: Complex64,
        d_power: i32,
    ) -> Result<Diagram> {
        if !(scalar.re.is_finite() && scalar.im.is_finite()) {
            return Err(Error::InvalidDiagram("scalar is not finite".into()));
        }
        let mut top_seen = vec![false; upper];
        let mut bottom_seen = vec![false; lower];
        for s in &strands {
            if s.start == s.end && !s.start.is_terminal() {
                return Err(Error::InvalidDiagram(format!(
                    "strand joins {} to itself",
                    s.start
                )));
            }
            for e in [&s.start, &s.end] {
                let (seen, i, what) = match e {
                    Endpoint::Top(i) => (&mut top_seen, *i, "top"),
                    Endpoint::Bottom(i) => (&mut bottom_seen, *i, "bottom"),
                    _ => continue,
                };
                match seen.get_mut(i) {
                    None => {
                        return Err(Error::InvalidDiagram(format!(
                            "{what} index {i} out of range"
                        )))
                    }
                    Some(true) => {
                        return Err(Error::InvalidDiagram(format!(
                            "{what} index {i} used twice"
                        )))
                    }
                    Some(flag) => *flag = true,
                }
            }
            s.validate().map_err(Error::InvalidDiagram)?;
        }
        if let Some(i) = top_seen.iter().position(|x| !x) {
            return Err(Error::InvalidDiagram(format!("top index {i} is not covered")));
        }
        if let Some(i) = bottom_seen.iter().position(|x| !x) {
            return Err(Error::InvalidDiagram(format!(
                "bottom index {i} is not covered"
            )));
        }
        for l in &loops {
            l.validate().map_err(Error::InvalidDiagram)?;
        }
        Ok(Diagram::assemble(upper, lower, strands, loops, scalar, d_power))
    }

    /// Canonicalize and sort without re-validating.
    pub(crate) fn assemble(
        upper: usize,
        lower: usize,
        strands: Vec<Strand>,
        loops: Vec<Loop>,
        scalar: Complex64,
        d_power: i32,
    ) -> Diagram {
        let mut strands: Vec<Strand> = strands.into_iter().map(Strand::canonical).collect();
        strands.sort();
        let mut loops: Vec<Loop> = loops.into_iter().map(Loop::canonical).collect();
        loops.sort();
        Diagram {
            upper,
            lower,
            strands,
            loops,
            scalar,
            d_power,
        }
    }

    pub fn identity(n: usize) -> Diagram {
        let strands = (0..n)
            .map(|i| Strand::plain(Endpoint::Top(i), Endpoint::Bottom(i)))
            .collect();
        Diagram::assemble(n, 0, Vec::new(), Vec::new(), Complex64::new(1.0, 0.0), 0)
            .with_strands(n, n, strands)
    }

    fn with_strands(mut self, upper: usize, lower: usize, strands: Vec<Strand>) -> Diagram {
        self.upper = upper;
        self.lower = lower;
        self.strands = strands;
        self.strands.sort();
        self
    }

    /// The maximally entangled ket `|Ω⟩` as a (0, 2) diagram.
    pub fn ket_cup() -> Diagram {
        Diagram::identity(0).with_strands(
            0,
            2,
            vec![Strand::new(Endpoint::Bottom(0), Endpoint::Bottom(1), vec![Bead::Cup])],
        )
    }

    /// The bra `⟨Ω|` as a (2, 0) diagram.
    pub fn bra_cap() -> Diagram {
        Diagram::identity(0).with_strands(
            2,
            0,
            vec![Strand::new(Endpoint::Top(0), Endpoint::Top(1), vec![Bead::Cap])],
        )
    }

    /// The projector `ω = |Ω⟩⟨Ω|` as a (2, 2) diagram: a cap on the inputs
    /// and a cup on the outputs.
    pub fn proj() -> Diagram {
        Diagram::bra_cap()
            .compose(&Diagram::ket_cup())
            .expect("cap and cup compose over zero wires")
    }

    pub fn ket(label: impl Into<String>) -> Diagram {
        Diagram::identity(0).with_strands(
            0,
            1,
            vec![Strand::plain(Endpoint::Bottom(0), Endpoint::Ket(label.into()))],
        )
    }

    pub fn bra(label: impl Into<String>) -> Diagram {
        Diagram::identity(0).with_strands(
            1,
            0,
            vec![Strand::plain(Endpoint::Top(0), Endpoint::Bra(label.into()))],
        )
    }

    /// A single wire carrying one decoration.
    pub fn op(label: impl Into<String>, flavor: Flavor) -> Diagram {
        Diagram::identity(1).with_strands(
            1,
            1,
            vec![Strand::new(
                Endpoint::Top(0),
                Endpoint::Bottom(0),
                vec![Bead::op(label, flavor)],
            )],
        )
    }

    /// The empty diagram carrying a scalar.
    pub fn scalar(value: Complex64) -> Diagram {
        Diagram::identity(0).scaled(value)
    }

    pub fn upper_arity(&self) -> usize {
        self.upper
    }

    pub fn lower_arity(&self) -> usize {
        self.lower
    }

    pub fn arities(&self) -> (usize, usize) {
        (self.upper, self.lower)
    }

    pub fn strands(&self) -> &[Strand] {
        &self.strands
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    pub fn scalar_factor(&self) -> Complex64 {
        self.scalar
    }

    pub fn d_power(&self) -> i32 {
        self.d_power
    }

    pub fn decoration_count(&self) -> usize {
        self.strands
            .iter()
            .map(|s| s.decorations().count())
            .chain(self.loops.iter().map(|l| l.word.iter().filter(|b| !b.is_bend()).count()))
            .sum()
    }

    pub fn has_terminals(&self) -> bool {
        self.strands
            .iter()
            .any(|s| s.start.is_terminal() || s.end.is_terminal())
    }

    /// Index of the strand touching `endpoint`.
    pub fn strand_at(&self, endpoint: &Endpoint) -> Option<usize> {
        self.strands
            .iter()
            .position(|s| &s.start == endpoint || &s.end == endpoint)
    }

    pub fn scaled(mut self, factor: Complex64) -> Diagram {
        self.scalar *= factor;
        self
    }

    /// Multiply by `d^k`.
    pub fn times_d_power(mut self, k: i32) -> Diagram {
        self.d_power += k;
        self
    }

    pub(crate) fn replace_parts(
        &self,
        strands: Vec<Strand>,
        loops: Vec<Loop>,
        scalar: Complex64,
        d_power: i32,
    ) -> Diagram {
        Diagram::assemble(self.upper, self.lower, strands, loops, scalar, d_power)
    }

    /// Horizontal juxtaposition; `other`'s boundary points shift right.
    pub fn tensor(&self, other: &Diagram) -> Diagram {
        let shift = |e: &Endpoint| match e {
            Endpoint::Top(i) => Endpoint::Top(i + self.upper),
            Endpoint::Bottom(i) => Endpoint::Bottom(i + self.lower),
            t => t.clone(),
        };
        let strands = self
            .strands
            .iter()
            .cloned()
            .chain(
                other
                    .strands
                    .iter()
                    .map(|s| Strand::new(shift(&s.start), shift(&s.end), s.word.clone())),
            )
            .collect();
        let loops = self.loops.iter().chain(&other.loops).cloned().collect();
        Diagram::assemble(
            self.upper + other.upper,
            self.lower + other.lower,
            strands,
            loops,
            self.scalar * other.scalar,
            self.d_power + other.d_power,
        )
    }

    /// Apply `self`, then `second`: glue `self`'s bottom points to
    /// `second`'s top points and re-thread the resulting chains.
    pub fn compose(&self, second: &Diagram) -> Result<Diagram> {
        if self.lower != second.upper {
            return Err(Error::ArityMismatch {
                first: self.arities(),
                second: second.arities(),
            });
        }
        let first_node = |e: &Endpoint| match e {
            Endpoint::Bottom(j) => Node::Glue(*j),
            other => Node::Outer(other.clone()),
        };
        let second_node = |e: &Endpoint| match e {
            Endpoint::Top(j) => Node::Glue(*j),
            other => Node::Outer(other.clone()),
        };
        let pieces = self
            .strands
            .iter()
            .map(|s| Piece::from_strand(s, first_node))
            .chain(second.strands.iter().map(|s| Piece::from_strand(s, second_node)))
            .collect();
        let threaded = rethread(pieces);
        let loops = self
            .loops
            .iter()
            .chain(&second.loops)
            .cloned()
            .chain(threaded.loops)
            .collect();
        Ok(Diagram::assemble(
            self.upper,
            second.lower,
            threaded.strands,
            loops,
            self.scalar * second.scalar,
            self.d_power + second.d_power + threaded.d_power_delta,
        ))
    }

    /// Compose a sequence top to bottom.
    pub fn chain<'a>(parts: impl IntoIterator<Item = &'a Diagram>) -> Result<Diagram> {
        let mut iter = parts.into_iter();
        let first = iter
            .next()
            .cloned()
            .unwrap_or_else(|| Diagram::identity(0));
        iter.try_fold(first, |acc, next| acc.compose(next))
    }

    /// Tensor a sequence left to right.
    pub fn tensor_all<'a>(parts: impl IntoIterator<Item = &'a Diagram>) -> Diagram {
        parts
            .into_iter()
            .fold(Diagram::identity(0), |acc, next| acc.tensor(next))
    }

    /// Vertical mirror image: `eval(dagger(D)) = eval(D)†`.
    pub fn dagger(&self) -> Diagram {
        let strands = self.strands.iter().map(Strand::daggered).collect();
        let loops = self.loops.iter().map(Loop::daggered).collect();
        Diagram::assemble(
            self.lower,
            self.upper,
            strands,
            loops,
            self.scalar.conj(),
            self.d_power,
        )
    }

    /// Insert a decoration into strand `strand` at word position `position`
    /// (0 = next to the start endpoint, `word.len()` = next to the end).
    pub fn decorate(
        &self,
        strand: usize,
        position: usize,
        label: impl Into<String>,
        flavor: Flavor,
    ) -> Result<Diagram> {
        let s = self
            .strands
            .get(strand)
            .ok_or_else(|| Error::InvalidSite(format!("strand {strand}")))?;
        if position > s.word.len() {
            return Err(Error::InvalidPosition {
                position,
                reason: format!("strand word has length {}", s.word.len()),
            });
        }
        let mut strands = self.strands.clone();
        strands[strand]
            .word
            .insert(position, Bead::op(label, flavor));
        Ok(Diagram::assemble(
            self.upper,
            self.lower,
            strands,
            self.loops.clone(),
            self.scalar,
            self.d_power,
        ))
    }

    /// Decorate the leg next to the start (`at_start = true`) or end endpoint.
    pub fn decorate_leg(
        &self,
        strand: usize,
        at_start: bool,
        label: impl Into<String>,
        flavor: Flavor,
    ) -> Result<Diagram> {
        let len = self
            .strands
            .get(strand)
            .map(|s| s.word.len())
            .ok_or_else(|| Error::InvalidSite(format!("strand {strand}")))?;
        self.decorate(strand, if at_start { 0 } else { len }, label, flavor)
    }

    /// Whether the boundary matching is non-crossing with the top points
    /// laid out left to right and the bottom points right to left around a
    /// rectangle.
    pub fn is_tl_planar(&self) -> Result<bool> {
        if self.has_terminals() {
            return Err(Error::TerminalPresent);
        }
        let pos = |e: &Endpoint| match e {
            Endpoint::Top(i) => *i,
            Endpoint::Bottom(j) => self.upper + (self.lower - 1 - j),
            _ => unreachable!("terminals rejected above"),
        };
        let chords: Vec<(usize, usize)> = self
            .strands
            .iter()
            .map(|s| {
                let (a, b) = (pos(&s.start), pos(&s.end));
                (a.min(b), a.max(b))
            })
            .collect();
        for (i, &(a, b)) in chords.iter().enumerate() {
            for &(c, e) in &chords[i + 1..] {
                let c_inside = a < c && c < b;
                let e_inside = a < e && e < b;
                if c_inside != e_inside {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Equality of all structure, with the scalar compared to a tolerance.
    pub fn approx_eq(&self, other: &Diagram, tol: f64) -> bool {
        self.upper == other.upper
            && self.lower == other.lower
            && self.strands == other.strands
            && self.loops == other.loops
            && self.d_power == other.d_power
            && (self.scalar - other.scalar).norm() <= tol
    }

    /// Structural digest (hex, 16 chars).
    pub fn digest(&self) -> String {
        let text = format!("{self:?}");
        let hash = Sha256::digest(text.as_bytes());
        hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}) x ({}{:+}i)",
            self.upper, self.lower, self.scalar.re, self.scalar.im
        )?;
        if self.d_power != 0 {
            write!(f, " d^{}", self.d_power)?;
        }
        for s in &self.strands {
            write!(f, " [{}", s.start)?;
            for b in &s.word {
                write!(f, " {}", BeadDisplay(b))?;
            }
            write!(f, " {}]", s.end)?;
        }
        for l in &self.loops {
            write!(f, " (")?;
            for (i, b) in l.word.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", BeadDisplay(b))?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

struct BeadDisplay<'a>(&'a Bead);

impl fmt::Display for BeadDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Bead::Cup => write!(f, "∪"),
            Bead::Cap => write!(f, "∩"),
            Bead::Op(d) if d.flavor == Flavor::Plain => write!(f, "{}", d.label),
            Bead::Op(d) => write!(f, "{}^{}", d.label, d.flavor.as_str()),
        }
    }
}
