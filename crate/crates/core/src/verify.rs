//! Independent checker for connectors and Gray codes.
//!
//! Nothing here depends on the solver; this module is the ground truth for
//! every positive answer the crate gives.

use std::collections::HashMap;

use serde::Serialize;

use crate::connector::Connector;
use crate::hypercube::Vertex;
use crate::pairset::PairSet;

/// The first failed clause of a check, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Violation {
    DimensionMismatch { pairs: u8, connector: u8 },
    PathCount { pairs: usize, paths: usize },
    EmptyPath { path: usize },
    OutOfRange { path: usize, bits: u32 },
    Endpoint { path: usize, first: Vertex, last: Vertex },
    DuplicatePair { path: usize, other: usize },
    Adjacency { path: usize, position: usize, from: Vertex, to: Vertex },
    Duplicate { vertex: Vertex },
    Missing { vertex: Vertex },
}

impl Violation {
    /// Which part of the connector definition failed.
    pub fn clause(&self) -> &'static str {
        match self {
            Violation::DimensionMismatch { .. } | Violation::PathCount { .. } | Violation::DuplicatePair { .. } => {
                "bijection"
            }
            Violation::EmptyPath { .. } | Violation::Endpoint { .. } => "endpoint",
            Violation::Adjacency { .. } => "adjacency",
            Violation::OutOfRange { .. } | Violation::Duplicate { .. } | Violation::Missing { .. } => "coverage",
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.clause(), serde_json::to_string(self).unwrap_or_default())
    }
}

struct Coverage {
    words: Vec<u64>,
}

impl Coverage {
    fn new(dim: u8) -> Coverage {
        Coverage { words: vec![0; (1usize << dim).div_ceil(64)] }
    }

    /// Marks `x`; false if it was already marked.
    fn mark(&mut self, x: u32) -> bool {
        let (w, b) = (x as usize / 64, x % 64);
        let fresh = self.words[w] >> b & 1 == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    fn first_missing(&self, dim: u8) -> Option<u32> {
        (0..1u32 << dim).find(|&x| self.words[x as usize / 64] >> (x % 64) & 1 == 0)
    }
}

/// Check that `c` is a connector of `a`.
pub fn check(a: &PairSet, c: &Connector) -> Result<(), Violation> {
    let dim = a.dim();
    if c.dim() != dim {
        return Err(Violation::DimensionMismatch { pairs: dim, connector: c.dim() });
    }
    if c.len() != a.len() {
        return Err(Violation::PathCount { pairs: a.len(), paths: c.len() });
    }
    let vx = |b: u32| Vertex::from_raw(b, dim);
    let limit = 1u64 << dim;
    let mut owner: HashMap<(u32, u32), Option<usize>> = a
        .pairs()
        .iter()
        .map(|p| ((p.a().bits(), p.b().bits()), None))
        .collect();
    for (j, path) in c.raw_paths().iter().enumerate() {
        let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
            return Err(Violation::EmptyPath { path: j });
        };
        if let Some(&bad) = path.iter().find(|&&x| x as u64 >= limit) {
            return Err(Violation::OutOfRange { path: j, bits: bad });
        }
        let key = (first.min(last), first.max(last));
        let closed = first == last && path.len() > 1;
        match owner.get_mut(&key) {
            Some(slot) if !closed => {
                if let Some(other) = *slot {
                    return Err(Violation::DuplicatePair { path: j, other });
                }
                *slot = Some(j);
            }
            _ => return Err(Violation::Endpoint { path: j, first: vx(first), last: vx(last) }),
        }
        for (pos, w) in path.windows(2).enumerate() {
            if (w[0] ^ w[1]).count_ones() != 1 {
                return Err(Violation::Adjacency { path: j, position: pos, from: vx(w[0]), to: vx(w[1]) });
            }
        }
    }
    let mut cov = Coverage::new(dim);
    for path in c.raw_paths() {
        for &x in path {
            if !cov.mark(x) {
                return Err(Violation::Duplicate { vertex: vx(x) });
            }
        }
    }
    match cov.first_missing(dim) {
        Some(x) => Err(Violation::Missing { vertex: vx(x) }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrayMode {
    Path,
    Cyclic,
}

/// Check that `seq` lists every vertex of `Q_n` once with unit steps.
pub fn check_gray(n: u8, seq: &[Vertex], mode: GrayMode) -> Result<(), Violation> {
    let mut raw: Vec<u32> = Vec::with_capacity(seq.len());
    for (pos, v) in seq.iter().enumerate() {
        if v.dim() != n {
            return Err(Violation::DimensionMismatch { pairs: n, connector: v.dim() });
        }
        if let Some(&prev) = raw.last() {
            if (prev ^ v.bits()).count_ones() != 1 {
                return Err(Violation::Adjacency { path: 0, position: pos - 1, from: seq[pos - 1], to: *v });
            }
        }
        raw.push(v.bits());
    }
    let mut cov = Coverage::new(n);
    for &x in &raw {
        if !cov.mark(x) {
            return Err(Violation::Duplicate { vertex: Vertex::from_raw(x, n) });
        }
    }
    if let Some(x) = cov.first_missing(n) {
        return Err(Violation::Missing { vertex: Vertex::from_raw(x, n) });
    }
    if mode == GrayMode::Cyclic && seq.len() > 1 {
        let (f, l) = (seq[0], seq[seq.len() - 1]);
        if !f.is_adjacent(l) {
            return Err(Violation::Adjacency { path: 0, position: seq.len() - 1, from: l, to: f });
        }
    }
    Ok(())
}

/// `check_gray` plus prescribed first and last vertices.
pub fn check_gray_between(n: u8, seq: &[Vertex], from: Vertex, to: Vertex) -> Result<(), Violation> {
    check_gray(n, seq, GrayMode::Path)?;
    let (first, last) = (seq[0], seq[seq.len() - 1]);
    if first != from || last != to {
        return Err(Violation::Endpoint { path: 0, first, last });
    }
    Ok(())
}
