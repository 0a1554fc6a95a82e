//! Exhaustive connector search in small dimensions, and isomorphism-reduced
//! census of pair-sets.
//!
//! Vertex sets are `u64` bitmasks, which caps the search at `n = 6`.

mod census;
mod naive;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::Serialize;

use crate::connector::Connector;
use crate::pairset::PairSet;

pub use census::{enumerate_classes, Census, CensusFilter, CensusScope, CensusSummary, ClassRecord, ClassVerdict, EdgeCount, ParityClass};
pub use naive::naive_connector;

/// Largest dimension the bitmask search handles.
pub const MAX_SEARCH_DIM: u8 = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BaseError {
    #[error("dimension {dim} exceeds the limit {max} for this operation")]
    DimensionTooLarge { dim: u8, max: u8 },
}

/// Proof-of-work for a negative answer: the search space was exhausted after
/// `nodes` moves. `token` hashes the instance together with the node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Exhaustion {
    pub nodes: u64,
    #[serde(serialize_with = "hex")]
    pub token: u64,
}

fn hex<S: serde::Serializer>(x: &u64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{x:016x}"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Connected(Connector),
    NonConnectable(Exhaustion),
    BudgetExceeded { nodes: u64 },
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub outcome: SearchOutcome,
    pub nodes: u64,
}

/// Bit tricks on subsets of `V_n`.
pub(crate) struct Cube {
    dim: u8,
    full: u64,
    /// `low[j]`: vertices with coordinate `j` equal to 0.
    low: [u64; MAX_SEARCH_DIM as usize],
    even: u64,
    nb: Vec<u64>,
}

impl Cube {
    pub(crate) fn new(dim: u8) -> Cube {
        assert!(dim <= MAX_SEARCH_DIM);
        let size = 1u32 << dim;
        let full = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
        let mut low = [0u64; MAX_SEARCH_DIM as usize];
        let mut even = 0;
        for x in 0..size {
            for (j, m) in low.iter_mut().enumerate().take(dim as usize) {
                if x >> j & 1 == 0 {
                    *m |= 1 << x;
                }
            }
            if x.count_ones() % 2 == 0 {
                even |= 1 << x;
            }
        }
        let nb = (0..size).map(|x| (0..dim).fold(0u64, |m, j| m | 1 << (x ^ 1 << j))).collect();
        Cube { dim, full, low, even, nb }
    }

    pub(crate) fn full(&self) -> u64 {
        self.full
    }

    pub(crate) fn nb(&self, x: u32) -> u64 {
        self.nb[x as usize]
    }

    fn flip(&self, s: u64, j: usize) -> u64 {
        let m = self.low[j];
        let k = 1u32 << j;
        ((s & m) << k) | ((s >> k) & m)
    }

    /// Every vertex adjacent to some vertex of `s`.
    fn spread(&self, s: u64) -> u64 {
        (0..self.dim as usize).fold(0, |acc, j| acc | self.flip(s, j))
    }

    /// Vertices with at least two neighbours in `s`.
    fn two_neighbours(&self, s: u64) -> u64 {
        let (mut ones, mut twos) = (0u64, 0u64);
        for j in 0..self.dim as usize {
            let x = self.flip(s, j);
            twos |= ones & x;
            ones |= x;
        }
        twos
    }

    fn chi(&self, s: u64) -> i32 {
        (s & self.even).count_ones() as i32 - (s & !self.even).count_ones() as i32
    }
}

fn chi(x: u32) -> i32 {
    if x.count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Net parity of the interior of any path from `f` to `t`.
fn interior_chi(f: u32, t: u32) -> i32 {
    if chi(f) != chi(t) {
        0
    } else {
        -chi(f)
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Step {
    Found,
    Dead,
    Budget,
}

struct Search<'c> {
    cube: &'c Cube,
    free: u64,
    front: Vec<u32>,
    target: Vec<u32>,
    done: Vec<bool>,
    paths: Vec<Vec<u32>>,
    open: usize,
    nodes: u64,
    budget: u64,
    forced: Vec<u8>,
    reach: Vec<bool>,
}

impl Search<'_> {
    fn options(&self, p: usize) -> u32 {
        let f = self.front[p];
        (self.cube.nb(f) & self.free).count_ones() + (self.cube.nb(f) >> self.target[p] & 1) as u32
    }

    fn feasible(&mut self) -> bool {
        let cube = self.cube;
        let mut ends = 0u64;
        for p in 0..self.front.len() {
            if !self.done[p] {
                ends |= 1 << self.front[p] | 1 << self.target[p];
                if cube.nb(self.target[p]) & (self.free | 1 << self.front[p]) == 0 {
                    return false;
                }
            }
        }
        // Every free vertex will be interior to some path.
        if self.free & !cube.two_neighbours(self.free | ends) != 0 {
            return false;
        }
        self.forced.iter_mut().for_each(|x| *x = 0);
        self.reach.iter_mut().for_each(|x| *x = false);
        let mut rest = self.free;
        while rest != 0 {
            let mut comp = rest & rest.wrapping_neg();
            loop {
                let next = comp | (cube.spread(comp) & self.free);
                if next == comp {
                    break;
                }
                comp = next;
            }
            rest &= !comp;
            let touch = cube.spread(comp);
            let (mut users, mut sole) = (0, 0);
            for p in 0..self.front.len() {
                if !self.done[p] && touch >> self.front[p] & 1 == 1 && touch >> self.target[p] & 1 == 1 {
                    users += 1;
                    sole = p;
                    self.reach[p] = true;
                }
            }
            let c = cube.chi(comp);
            if users == 0 || c.abs() > users {
                return false;
            }
            if users == 1 {
                self.forced[sole] += 1;
                if self.forced[sole] > 1 || c != interior_chi(self.front[sole], self.target[sole]) {
                    return false;
                }
            }
        }
        (0..self.front.len()).all(|p| {
            self.done[p] || self.reach[p] || cube.nb(self.front[p]) >> self.target[p] & 1 == 1
        })
    }

    fn dfs(&mut self) -> Step {
        if self.open == 0 {
            return if self.free == 0 { Step::Found } else { Step::Dead };
        }
        if !self.feasible() {
            return Step::Dead;
        }
        let mut best: Option<(u32, usize)> = None;
        for p in 0..self.front.len() {
            if self.done[p] {
                continue;
            }
            let o = self.options(p);
            if o == 0 {
                return Step::Dead;
            }
            if best.is_none_or(|(b, _)| o < b) {
                best = Some((o, p));
            }
        }
        let p = best.expect("an open pair").1;
        let (f, t) = (self.front[p], self.target[p]);
        let mut moves = [(0u32, 0u32); MAX_SEARCH_DIM as usize];
        let mut len = 0;
        let mut cand = self.cube.nb(f) & (self.free | 1 << t);
        while cand != 0 {
            let w = cand.trailing_zeros();
            cand &= cand - 1;
            // Target first, then Warnsdorff: fewest onward free neighbours.
            let key = if w == t { 0 } else { 1 + (self.cube.nb(w) & self.free).count_ones() };
            moves[len] = (key, w);
            len += 1;
        }
        moves[..len].sort_unstable();
        for &(_, w) in &moves[..len] {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::Budget;
            }
            self.paths[p].push(w);
            if w == t {
                self.done[p] = true;
                self.open -= 1;
            } else {
                self.free &= !(1 << w);
                self.front[p] = w;
            }
            match self.dfs() {
                Step::Dead => {}
                other => return other,
            }
            self.paths[p].pop();
            if w == t {
                self.done[p] = false;
                self.open += 1;
            } else {
                self.free |= 1 << w;
                self.front[p] = f;
            }
        }
        Step::Dead
    }
}

fn token(a: &PairSet, nodes: u64) -> u64 {
    let mut h = DefaultHasher::new();
    a.dim().hash(&mut h);
    a.raw().hash(&mut h);
    nodes.hash(&mut h);
    h.finish()
}

/// Backtracking search for a connector of `a`, pruned by parity, dead-vertex
/// and component arguments. With `budget = None` the search runs to
/// completion, so a negative answer is exhaustive.
pub fn search_connector(a: &PairSet, budget: Option<u64>) -> Result<SearchResult, BaseError> {
    let dim = a.dim();
    if dim > MAX_SEARCH_DIM {
        return Err(BaseError::DimensionTooLarge { dim, max: MAX_SEARCH_DIM });
    }
    let cube = Cube::new(dim);
    let raw = a.raw();
    let mut s = Search {
        cube: &cube,
        free: cube.full(),
        front: Vec::with_capacity(raw.len()),
        target: Vec::with_capacity(raw.len()),
        done: Vec::with_capacity(raw.len()),
        paths: Vec::with_capacity(raw.len()),
        open: 0,
        nodes: 0,
        budget: budget.unwrap_or(u64::MAX),
        forced: vec![0; raw.len()],
        reach: vec![false; raw.len()],
    };
    let mut balance = 0;
    for &(x, y) in &raw {
        s.free &= !(1 << x | 1 << y);
        s.front.push(x);
        s.target.push(y);
        s.done.push(x == y);
        s.paths.push(vec![x]);
        if x != y {
            s.open += 1;
            balance += interior_chi(x, y);
        }
    }
    let step = if balance != cube.chi(s.free) { Step::Dead } else { s.dfs() };
    let nodes = s.nodes;
    let outcome = match step {
        Step::Found => SearchOutcome::Connected(Connector::from_raw(dim, s.paths)),
        Step::Dead => SearchOutcome::NonConnectable(Exhaustion { nodes, token: token(a, nodes) }),
        Step::Budget => SearchOutcome::BudgetExceeded { nodes },
    };
    Ok(SearchResult { outcome, nodes })
}

#[cfg(test)]
mod tests;
