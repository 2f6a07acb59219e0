//! Random diagrams for property tests and fuzzing.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{Bead, Diagram, Endpoint, Flavor, Loop, Strand};
use crate::numeric::{random_matrix, random_state};
use crate::registry::Registry;

const FLAVORS: [Flavor; 4] = [Flavor::Plain, Flavor::Adjoint, Flavor::Transpose, Flavor::Conjugate];

#[derive(Clone, Debug)]
pub struct SampleConfig {
    /// Decoration labels to draw from.
    pub ops: Vec<String>,
    /// Terminal labels to draw from. Empty disables terminals.
    pub vectors: Vec<String>,
    pub max_decorations: usize,
    /// Chance of adding an extra pair of terminals.
    pub terminal_prob: f64,
    pub loop_prob: f64,
    /// Chance of routing a strand through two more bends than it needs.
    pub extra_bend_prob: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            ops: vec!["A".into(), "B".into(), "C".into()],
            vectors: vec!["u".into(), "v".into()],
            max_decorations: 3,
            terminal_prob: 0.2,
            loop_prob: 0.2,
            extra_bend_prob: 0.25,
        }
    }
}

impl SampleConfig {
    pub fn without_terminals(mut self) -> Self {
        self.vectors.clear();
        self.terminal_prob = 0.0;
        self
    }
}

/// A registry resolving every label in `cfg` to random data. Matrices are
/// scaled to unit Frobenius norm so values stay of order one.
pub fn registry_for(cfg: &SampleConfig, d: usize, seed: u64) -> Registry {
    let mut r = Registry::standard(d).expect("positive dimension");
    for (i, label) in cfg.ops.iter().enumerate() {
        let m = random_matrix(d, seed.wrapping_add(i as u64));
        let norm = m.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        r.insert(label.clone(), m.scale(Complex64::new(1.0 / norm, 0.0)))
            .expect("square matrix");
    }
    for (i, label) in cfg.vectors.iter().enumerate() {
        r.insert_vector(label.clone(), random_state(d, seed.wrapping_add(1000 + i as u64)))
            .expect("matching length");
    }
    r
}

fn random_op<R: Rng>(rng: &mut R, cfg: &SampleConfig) -> Bead {
    let label = &cfg.ops[rng.random_range(0..cfg.ops.len())];
    Bead::op(label.clone(), FLAVORS[rng.random_range(0..FLAVORS.len())])
}

fn op_run<R: Rng>(rng: &mut R, cfg: &SampleConfig, budget: &mut usize) -> Vec<Bead> {
    if cfg.ops.is_empty() || *budget == 0 {
        return Vec::new();
    }
    let n = rng.random_range(0..=(*budget).min(2));
    *budget -= n;
    (0..n).map(|_| random_op(rng, cfg)).collect()
}

/// A consistent word between two endpoints.
fn strand_word<R: Rng>(
    rng: &mut R,
    cfg: &SampleConfig,
    start: &Endpoint,
    end: &Endpoint,
    budget: &mut usize,
) -> Vec<Bead> {
    let first = start.is_source();
    let last = !end.is_source();
    let mut bends = usize::from(first != last);
    if rng.random_bool(cfg.extra_bend_prob) {
        bends += 2;
    }
    let mut word = op_run(rng, cfg, budget);
    let mut with = first;
    for _ in 0..bends {
        word.push(if with { Bead::Cap } else { Bead::Cup });
        with = !with;
        word.extend(op_run(rng, cfg, budget));
    }
    word
}

fn random_loop<R: Rng>(rng: &mut R, cfg: &SampleConfig, budget: &mut usize) -> Loop {
    let mut word = op_run(rng, cfg, budget);
    if rng.random_bool(0.5) || word.is_empty() {
        word.push(Bead::Cup);
        word.extend(op_run(rng, cfg, budget));
        word.push(Bead::Cap);
        word.extend(op_run(rng, cfg, budget));
    }
    Loop::new(word)
}

/// A random diagram with the given arities.
pub fn sample_with_arity<R: Rng>(rng: &mut R, upper: usize, lower: usize, cfg: &SampleConfig) -> Diagram {
    let mut points: Vec<Endpoint> = (0..upper)
        .map(Endpoint::Top)
        .chain((0..lower).map(Endpoint::Bottom))
        .collect();
    let terminal = |rng: &mut R| {
        let label = cfg.vectors[rng.random_range(0..cfg.vectors.len())].clone();
        if rng.random_bool(0.5) {
            Endpoint::Ket(label)
        } else {
            Endpoint::Bra(label)
        }
    };
    if !cfg.vectors.is_empty() {
        if points.len() % 2 == 1 {
            points.push(terminal(rng));
        }
        while rng.random_bool(cfg.terminal_prob) {
            points.push(terminal(rng));
            points.push(terminal(rng));
        }
    }
    // Odd boundary without terminals: close it with one extra bottom point.
    let lower = if points.len() % 2 == 1 {
        points.push(Endpoint::Bottom(lower));
        lower + 1
    } else {
        lower
    };
    points.shuffle(rng);

    let mut budget = cfg.max_decorations;
    let mut strands = Vec::new();
    for pair in points.chunks(2) {
        let word = strand_word(rng, cfg, &pair[0], &pair[1], &mut budget);
        strands.push(Strand::new(pair[0].clone(), pair[1].clone(), word));
    }
    let mut loops = Vec::new();
    while rng.random_bool(cfg.loop_prob) && loops.len() < 3 {
        loops.push(random_loop(rng, cfg, &mut budget));
    }
    let scalar = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let d_power = rng.random_range(-1..=1);
    Diagram::from_parts(upper, lower, strands, loops, scalar, d_power).expect("sampled diagram is valid")
}

/// A random diagram with at most `max_points` boundary points.
pub fn sample<R: Rng>(rng: &mut R, cfg: &SampleConfig, max_points: usize) -> Diagram {
    let total = rng.random_range(0..=max_points);
    let upper = rng.random_range(0..=total);
    sample_with_arity(rng, upper, total - upper, cfg)
}
