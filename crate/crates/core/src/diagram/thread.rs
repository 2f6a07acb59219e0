//! Re-threading of strand pieces through glue points.
//!
//! Composition and closure both cut the boundary of one or more diagrams
//! into glue points, each joining exactly two piece ends, then walk the
//! resulting chains back into strands and loops.

use std::collections::HashMap;

use super::{Bead, Endpoint, Loop, Strand};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Outer(Endpoint),
    Glue(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Piece {
    pub start: Node,
    pub end: Node,
    pub word: Vec<Bead>,
    /// Flow enters the piece at its start.
    pub start_src: bool,
    /// Flow enters the piece at its end.
    pub end_src: bool,
}

impl Piece {
    pub fn from_strand(s: &Strand, map: impl Fn(&Endpoint) -> Node) -> Piece {
        Piece {
            start: map(&s.start),
            end: map(&s.end),
            word: s.word.clone(),
            start_src: s.start.is_source(),
            end_src: s.end.is_source(),
        }
    }

    /// An undecorated wire whose start receives flow from glue `from` and
    /// whose end passes it on to glue `to`.
    pub fn wire(from: usize, to: usize) -> Piece {
        Piece {
            start: Node::Glue(from),
            end: Node::Glue(to),
            word: Vec::new(),
            start_src: true,
            end_src: false,
        }
    }

    fn parity(&self) -> i32 {
        i32::from(self.start_src == self.end_src)
    }
}

pub(crate) struct Threaded {
    pub strands: Vec<Strand>,
    pub loops: Vec<Loop>,
    pub d_power_delta: i32,
}

pub(crate) fn rethread(pieces: Vec<Piece>) -> Threaded {
    // glue id -> attachments (piece index, at piece start)
    let mut glue: HashMap<usize, Vec<(usize, bool)>> = HashMap::new();
    for (i, p) in pieces.iter().enumerate() {
        if let Node::Glue(g) = p.start {
            glue.entry(g).or_default().push((i, true));
        }
        if let Node::Glue(g) = p.end {
            glue.entry(g).or_default().push((i, false));
        }
    }
    let partner = |g: usize, from: (usize, bool)| -> (usize, bool) {
        let list = &glue[&g];
        debug_assert_eq!(list.len(), 2, "glue point {g} must join two piece ends");
        if list[0] == from {
            list[1]
        } else {
            list[0]
        }
    };

    let mut visited = vec![false; pieces.len()];
    let mut strands = Vec::new();
    let mut loops = Vec::new();
    let mut delta2 = 0i32; // twice the d-power change

    let append = |word: &mut Vec<Bead>, p: &Piece, forward: bool| {
        if forward {
            word.extend(p.word.iter().cloned());
        } else {
            word.extend(p.word.iter().rev().cloned());
        }
    };

    for i in 0..pieces.len() {
        if visited[i] {
            continue;
        }
        let p = &pieces[i];
        let forward = match (&p.start, &p.end) {
            (Node::Outer(_), _) => true,
            (_, Node::Outer(_)) => false,
            _ => continue,
        };
        let entry = if forward { &p.start } else { &p.end };
        let Node::Outer(start) = entry.clone() else {
            unreachable!()
        };
        let start_src = if forward { p.start_src } else { p.end_src };
        let mut word = Vec::new();
        let mut parity_sum = 0;
        let (mut cur, mut fwd) = (i, forward);
        let (end, end_src) = loop {
            visited[cur] = true;
            let piece = &pieces[cur];
            append(&mut word, piece, fwd);
            parity_sum += piece.parity();
            let (exit, exit_src) = if fwd {
                (&piece.end, piece.end_src)
            } else {
                (&piece.start, piece.start_src)
            };
            match exit {
                Node::Outer(e) => break (e.clone(), exit_src),
                Node::Glue(g) => {
                    let (next, at_start) = partner(*g, (cur, !fwd));
                    cur = next;
                    fwd = at_start;
                }
            }
        };
        let parity_new = i32::from(start_src == end_src);
        delta2 += parity_new - parity_sum;
        strands.push(Strand::new(start, end, word));
    }

    for i in 0..pieces.len() {
        if visited[i] {
            continue;
        }
        let mut word = Vec::new();
        let mut parity_sum = 0;
        let (mut cur, mut fwd) = (i, true);
        loop {
            visited[cur] = true;
            let piece = &pieces[cur];
            append(&mut word, piece, fwd);
            parity_sum += piece.parity();
            let exit = if fwd { &piece.end } else { &piece.start };
            let Node::Glue(g) = exit else {
                unreachable!("pieces with outer ends were consumed above")
            };
            let (next, at_start) = partner(*g, (cur, !fwd));
            if next == i && at_start {
                break;
            }
            cur = next;
            fwd = at_start;
        }
        if !word.iter().any(Bead::is_bend) && !pieces[i].start_src {
            word.reverse();
        }
        delta2 += 2 - parity_sum;
        loops.push(Loop::new(word));
    }

    debug_assert_eq!(delta2 % 2, 0);
    Threaded {
        strands,
        loops,
        d_power_delta: delta2 / 2,
    }
}
