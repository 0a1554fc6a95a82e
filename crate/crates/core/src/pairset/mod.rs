//! Pairs, pair-sets and their algebra: parity sums, projections into the two
//! half-cubes, encompassed vertices, diminishability, and the merge relation.

pub(crate) mod canonical;
mod matching;

pub use canonical::{automorphism_count, automorphisms, canonical_form, Automorphism};
pub use matching::{build_matching, build_matching_with, Matching};

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypercube::{iota_bits, rho_bits, HypercubeError, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairSetError {
    #[error(transparent)]
    Hypercube(#[from] HypercubeError),
    #[error("vertex {0} appears in more than one pair")]
    Overlap(Vertex),
    #[error("nonempty pair-set with only degenerate pairs")]
    AllDegenerate,
    #[error("pair-set is not odd")]
    NotOdd,
    #[error("pair-set has {size} pairs, expected {expected}")]
    SizeMismatch { size: usize, expected: usize },
    #[error("dimension {0} too large for this operation")]
    DimensionTooLarge(u8),
    #[error("pair-set is unbalanced (chi = {0})")]
    Unbalanced(i32),
    #[error("no matching respects the degenerate-pair constraint at coordinate {0}")]
    ConstraintInfeasibleAtI(usize),
    #[error("invalid matching: {0}")]
    BadMatching(String),
    #[error("{0} and {1} are not adjacent")]
    NotAnEdge(Vertex, Vertex),
    #[error("both endpoints belong to the same pair")]
    SharedPair,
    #[error("pair index {0} out of range")]
    BadIndex(usize),
    #[error("vertex {0} is not in the given pair")]
    NotInPair(Vertex),
}

/// Classification of a pair. `Edge` pairs are also odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Edge,
    Odd,
    Even,
    Degenerate,
}

impl PairKind {
    pub fn is_odd(self) -> bool {
        matches!(self, PairKind::Edge | PairKind::Odd)
    }
}

/// An unordered pair of vertices, stored with `a <= b`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    a: Vertex,
    b: Vertex,
}

impl Pair {
    pub fn new(x: Vertex, y: Vertex) -> Result<Pair, PairSetError> {
        if x.dim() != y.dim() {
            return Err(HypercubeError::DimensionMismatch(x.dim(), y.dim()).into());
        }
        Ok(Pair::ordered(x, y))
    }

    pub(crate) fn ordered(x: Vertex, y: Vertex) -> Pair {
        if x <= y {
            Pair { a: x, b: y }
        } else {
            Pair { a: y, b: x }
        }
    }

    pub fn a(&self) -> Vertex {
        self.a
    }

    pub fn b(&self) -> Vertex {
        self.b
    }

    pub fn dim(&self) -> u8 {
        self.a.dim()
    }

    pub fn kind(&self) -> PairKind {
        let d = (self.a.bits() ^ self.b.bits()).count_ones();
        match d {
            0 => PairKind::Degenerate,
            1 => PairKind::Edge,
            d if d % 2 == 1 => PairKind::Odd,
            _ => PairKind::Even,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.kind().is_odd()
    }

    pub fn is_edge(&self) -> bool {
        self.kind() == PairKind::Edge
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// `χ(α, β) = χ(α) + χ(β)`.
    pub fn chi(&self) -> i32 {
        self.a.parity() + self.b.parity()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint other than `v`.
    pub fn other(&self, v: Vertex) -> Option<Vertex> {
        if self.a == v {
            Some(self.b)
        } else if self.b == v {
            Some(self.a)
        } else {
            None
        }
    }

    /// Both endpoints have coordinate `i` equal to `k`.
    pub fn aligned_at(&self, i: usize, k: u8) -> bool {
        self.a.coord(i) == k && self.b.coord(i) == k
    }

    pub fn is_split(&self, i: usize) -> bool {
        self.a.coord(i) != self.b.coord(i)
    }

    pub(crate) fn raw(&self) -> (u32, u32) {
        (self.a.bits(), self.b.bits())
    }

    pub(crate) fn from_raw(x: u32, y: u32, dim: u8) -> Pair {
        Pair::ordered(Vertex::from_raw(x, dim), Vertex::from_raw(y, dim))
    }
}

impl fmt::Debug for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.a, self.b)
    }
}

impl Serialize for Pair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.a, self.b].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y] = <[Vertex; 2]>::deserialize(d)?;
        Pair::new(x, y).map_err(serde::de::Error::custom)
    }
}

/// An edge `{β, β'}` used to merge two pairs `{α, β}`, `{α', β'}` into `{α, α'}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MergeEdge(pub Vertex, pub Vertex);

/// A set of pairwise disjoint pairs in `Q_dim`, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PairSet {
    dim: u8,
    pairs: Vec<Pair>,
}

impl fmt::Debug for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PairSet(n={}, {:?})", self.dim, self.pairs)
    }
}

fn check_pairs(dim: u8, pairs: &[Pair]) -> Result<(), PairSetError> {
    let mut seen = HashSet::with_capacity(pairs.len() * 2);
    for p in pairs {
        if p.dim() != dim {
            return Err(HypercubeError::DimensionMismatch(dim, p.dim()).into());
        }
        if !seen.insert(p.a) {
            return Err(PairSetError::Overlap(p.a));
        }
        if !p.is_degenerate() && !seen.insert(p.b) {
            return Err(PairSetError::Overlap(p.b));
        }
    }
    if !pairs.is_empty() && pairs.iter().all(Pair::is_degenerate) {
        return Err(PairSetError::AllDegenerate);
    }
    Ok(())
}

impl PairSet {
    pub fn new(dim: u8, mut pairs: Vec<Pair>) -> Result<PairSet, PairSetError> {
        if !(1..=crate::hypercube::MAX_DIM).contains(&dim) {
            return Err(HypercubeError::BadDimension(dim as u32).into());
        }
        check_pairs(dim, &pairs)?;
        pairs.sort();
        Ok(PairSet { dim, pairs })
    }

    pub fn empty(dim: u8) -> PairSet {
        PairSet { dim, pairs: Vec::new() }
    }

    /// Build from `(x, y)` bitmask pairs, validating.
    pub fn from_bits(dim: u8, raw: &[(u32, u32)]) -> Result<PairSet, PairSetError> {
        let mut pairs = Vec::with_capacity(raw.len());
        for &(x, y) in raw {
            let x = Vertex::new(x as u64, dim as u32)?;
            let y = Vertex::new(y as u64, dim as u32)?;
            pairs.push(Pair::ordered(x, y));
        }
        PairSet::new(dim, pairs)
    }

    /// Parse pairs of bitstrings, e.g. `[("0000", "1110")]`.
    pub fn parse(pairs: &[(&str, &str)]) -> Result<PairSet, PairSetError> {
        let mut out = Vec::new();
        let mut dim = None;
        for (x, y) in pairs {
            let x: Vertex = x.parse()?;
            let y: Vertex = y.parse()?;
            dim.get_or_insert(x.dim());
            out.push(Pair::new(x, y)?);
        }
        match dim {
            Some(d) => PairSet::new(d, out),
            None => Err(HypercubeError::Parse("empty pair list".into()).into()),
        }
    }

    pub(crate) fn from_raw_unchecked(dim: u8, raw: impl IntoIterator<Item = (u32, u32)>) -> PairSet {
        let mut pairs: Vec<Pair> = raw.into_iter().map(|(x, y)| Pair::from_raw(x, y, dim)).collect();
        pairs.sort();
        debug_assert!(check_pairs(dim, &pairs).is_ok(), "invalid pair-set {pairs:?}");
        PairSet { dim, pairs }
    }

    pub(crate) fn try_from_raw(dim: u8, raw: impl IntoIterator<Item = (u32, u32)>) -> Result<PairSet, PairSetError> {
        let mut pairs: Vec<Pair> = raw.into_iter().map(|(x, y)| Pair::from_raw(x, y, dim)).collect();
        pairs.sort();
        check_pairs(dim, &pairs)?;
        Ok(PairSet { dim, pairs })
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub(crate) fn raw(&self) -> Vec<(u32, u32)> {
        self.pairs.iter().map(Pair::raw).collect()
    }

    /// `‖A‖`: the number of odd pairs.
    pub fn odd_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.is_odd()).count()
    }

    pub fn edge_pair_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.is_edge()).count()
    }

    pub fn is_odd(&self) -> bool {
        self.pairs.iter().all(Pair::is_odd)
    }

    pub fn is_pure(&self) -> bool {
        !self.pairs.iter().any(Pair::is_degenerate)
    }

    /// `χ(A)`.
    pub fn chi(&self) -> i32 {
        self.pairs.iter().map(Pair::chi).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.chi() == 0
    }

    /// `⋃A`, sorted.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = Vec::with_capacity(2 * self.len());
        for p in &self.pairs {
            v.push(p.a);
            if !p.is_degenerate() {
                v.push(p.b);
            }
        }
        v.sort();
        v
    }

    pub(crate) fn vertex_bits(&self) -> HashSet<u32> {
        self.vertices().into_iter().map(Vertex::bits).collect()
    }

    pub fn index_of_vertex(&self, v: Vertex) -> Option<usize> {
        self.pairs.iter().position(|p| p.contains(v))
    }

    pub fn index_of_pair(&self, p: &Pair) -> Option<usize> {
        self.pairs.binary_search(p).ok()
    }

    pub fn contains_pair(&self, p: &Pair) -> bool {
        self.index_of_pair(p).is_some()
    }

    /// `σ_i(A) = (n0, n1)`.
    pub fn sigma(&self, i: usize) -> (usize, usize) {
        let mut n = (0, 0);
        for p in &self.pairs {
            if p.aligned_at(i, 0) {
                n.0 += 1;
            } else if p.aligned_at(i, 1) {
                n.1 += 1;
            }
        }
        n
    }

    pub fn split_count(&self, i: usize) -> usize {
        self.pairs.iter().filter(|p| p.is_split(i)).count()
    }

    /// `ρ_{i=k}(A)`: the pairs aligned at `k`, with coordinate `i` deleted.
    pub fn rho_set(&self, i: usize, k: u8) -> Result<Projection, PairSetError> {
        if self.dim < 2 || i >= self.dim as usize {
            return Err(HypercubeError::BadCoordinate { coord: i, dim: self.dim }.into());
        }
        let dim = self.dim - 1;
        let mut pairs: Vec<Pair> = self
            .pairs
            .iter()
            .filter(|p| p.aligned_at(i, k))
            .map(|p| Pair::from_raw(rho_bits(p.a.bits(), i), rho_bits(p.b.bits(), i), dim))
            .collect();
        pairs.sort();
        Ok(Projection { dim, pairs })
    }

    /// `ι_{i,k}(A0, A1)`: `A0` goes to the half with coordinate `i` equal to `k`.
    pub fn iota_set(a0: &PairSet, a1: &PairSet, i: usize, k: u8) -> Result<PairSet, PairSetError> {
        if a0.dim != a1.dim {
            return Err(HypercubeError::DimensionMismatch(a0.dim, a1.dim).into());
        }
        let dim = a0.dim + 1;
        if dim > crate::hypercube::MAX_DIM || i >= dim as usize {
            return Err(HypercubeError::BadCoordinate { coord: i, dim }.into());
        }
        let k = (k & 1) as u32;
        let raw: Vec<(u32, u32)> = [(a0, k), (a1, 1 - k)]
            .iter()
            .flat_map(|&(s, side)| {
                s.pairs.iter().map(move |p| (iota_bits(p.a.bits(), i, side), iota_bits(p.b.bits(), i, side)))
            })
            .collect();
        // Each half may be empty, but the union must still contain a real pair.
        PairSet::try_from_raw(dim, raw)
    }

    /// `enco(A) = enco(⋃A)`.
    pub fn enco(&self) -> Vec<Vertex> {
        enco(&self.vertices(), self.dim)
    }

    /// `enc(A) = enco(A) \ ⋃A`.
    pub fn enc(&self) -> Vec<Vertex> {
        let set = self.vertex_bits();
        self.enco().into_iter().filter(|v| !set.contains(&v.bits())).collect()
    }

    /// Diminishability with the reason for the verdict.
    pub fn is_diminishable(&self) -> Result<Diminishability, PairSetError> {
        if !self.is_odd() {
            return Err(PairSetError::NotOdd);
        }
        let n = self.dim as usize;
        let size = self.len();
        let verdict = |yes: bool, reason| Ok(Diminishability { diminishable: yes, reason });
        if size == 0 {
            return verdict(false, DimReason::Empty);
        }
        if size < n {
            if n != 4 {
                return verdict(true, DimReason::SmallSize);
            }
            if self.edge_pair_count() > 0 {
                return verdict(true, DimReason::SmallSizeWithEdgePair);
            }
            return match self.facet_containing_all() {
                Some((coord, k)) => verdict(false, DimReason::InsideSubcube { coord, k }),
                None => verdict(true, DimReason::NotInsideSubcube),
            };
        }
        if size > n {
            return verdict(false, DimReason::TooLarge);
        }
        if n == 4 {
            return verdict(false, DimReason::FullSizeInDimensionFour);
        }
        if self.edge_pair_count() < 2 {
            return verdict(false, DimReason::TooFewEdgePairs(self.edge_pair_count()));
        }
        let enc = self.enc();
        if !enc.is_empty() {
            return verdict(false, DimReason::Encompassed(enc));
        }
        verdict(true, DimReason::FullSize)
    }

    pub fn diminishable(&self) -> bool {
        matches!(self.is_diminishable(), Ok(Diminishability { diminishable: true, .. }))
    }

    /// A facet `{α(i) = k}` containing every vertex of `⋃A`, if any.
    pub fn facet_containing_all(&self) -> Option<(usize, u8)> {
        let verts = self.vertices();
        (0..self.dim as usize).flat_map(|i| [(i, 0u8), (i, 1u8)]).find(|&(i, k)| verts.iter().all(|v| v.coord(i) == k))
    }

    /// Whether `i` is separating: aligned edge pairs exist on both sides of `i`.
    pub fn separating(&self, i: usize) -> Result<bool, PairSetError> {
        self.require_full_size()?;
        let mut side = [false; 2];
        for p in self.pairs.iter().filter(|p| p.is_edge()) {
            for k in 0..2u8 {
                if p.aligned_at(i, k) {
                    side[k as usize] = true;
                }
            }
        }
        Ok(side[0] && side[1])
    }

    pub fn separating_coordinates(&self) -> Vec<usize> {
        (0..self.dim as usize).filter(|&i| self.separating(i).unwrap_or(false)).collect()
    }

    fn require_full_size(&self) -> Result<(), PairSetError> {
        if self.len() != self.dim as usize {
            return Err(PairSetError::SizeMismatch { size: self.len(), expected: self.dim as usize });
        }
        Ok(())
    }

    /// Whether `i` is bad for `A`.
    pub fn bad(&self, i: usize) -> Result<bool, PairSetError> {
        Ok(self.bad_witness(i)?.is_some())
    }

    pub fn bad_coordinates(&self) -> Vec<usize> {
        (0..self.dim as usize).filter(|&i| self.bad(i).unwrap_or(false)).collect()
    }

    /// The distinguished pairs making `i` bad, found by trying every choice.
    pub fn bad_witness(&self, i: usize) -> Result<Option<BadWitness>, PairSetError> {
        self.require_full_size()?;
        let n = self.dim as usize;
        if n < 3 || !self.separating(i)? {
            return Ok(None);
        }
        let (n0, n1) = self.sigma(i);
        for k in 0..2u8 {
            let (nk, nother) = if k == 0 { (n0, n1) } else { (n1, n0) };
            if nk != n - 3 || nother != 1 {
                continue;
            }
            let oriented = |p: &Pair| -> Option<(Vertex, Vertex)> {
                if p.a.coord(i) == k && p.b.coord(i) != k {
                    Some((p.a, p.b))
                } else if p.b.coord(i) == k && p.a.coord(i) != k {
                    Some((p.b, p.a))
                } else {
                    None
                }
            };
            for (x0, p0) in self.pairs.iter().enumerate() {
                let Some((a0, b0)) = oriented(p0) else { continue };
                for (x1, p1) in self.pairs.iter().enumerate() {
                    if x1 == x0 {
                        continue;
                    }
                    let Some((a1, b1)) = oriented(p1) else { continue };
                    if a0.parity() == a1.parity() {
                        continue;
                    }
                    for (x2, p2) in self.pairs.iter().enumerate() {
                        if x2 == x0 || x2 == x1 || !p2.aligned_at(i, 1 - k) {
                            continue;
                        }
                        for (a2, b2) in [(p2.a, p2.b), (p2.b, p2.a)] {
                            let w = BadWitness { coord: i, k, pairs: [x0, x1, x2], alpha: [a0, a1, a2], beta: [b0, b1, b2] };
                            if self.bad_neighbourhood_holds(&w) {
                                return Ok(Some(w));
                            }
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    fn bad_neighbourhood_holds(&self, w: &BadWitness) -> bool {
        let i = w.coord;
        let rest: HashSet<Vertex> = self
            .pairs
            .iter()
            .enumerate()
            .filter(|(x, _)| !w.pairs.contains(x))
            .flat_map(|(_, p)| [p.a, p.b])
            .collect();
        let far = [w.alpha[2], w.beta[0], w.beta[1], w.beta[2]];
        (0..2).all(|j| {
            (0..self.dim as usize).filter(|&m| m != i).all(|m| {
                let kappa = w.alpha[j].flip(m);
                rest.contains(&kappa) || kappa == w.alpha[1 - j] || far.contains(&kappa.flip(i))
            })
        })
    }

    /// Apply `A ⇒ B` through the edge `(β, β')` with `β` in pair `p1`, `β'` in pair `p2`.
    pub fn imply_step(&self, p1: usize, p2: usize, beta: Vertex, beta2: Vertex) -> Result<(PairSet, MergeEdge), PairSetError> {
        let (q1, q2) = (
            *self.pairs.get(p1).ok_or(PairSetError::BadIndex(p1))?,
            *self.pairs.get(p2).ok_or(PairSetError::BadIndex(p2))?,
        );
        if p1 == p2 {
            return Err(PairSetError::SharedPair);
        }
        let alpha = q1.other(beta).ok_or(PairSetError::NotInPair(beta))?;
        let alpha2 = q2.other(beta2).ok_or(PairSetError::NotInPair(beta2))?;
        if !beta.is_adjacent(beta2) {
            return Err(PairSetError::NotAnEdge(beta, beta2));
        }
        let mut pairs: Vec<Pair> =
            self.pairs.iter().enumerate().filter(|&(x, _)| x != p1 && x != p2).map(|(_, p)| *p).collect();
        pairs.push(Pair::ordered(alpha, alpha2));
        Ok((PairSet::new(self.dim, pairs)?, MergeEdge(beta, beta2)))
    }

    /// Apply an automorphism to every pair.
    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> PairSet {
        let pairs: Vec<Pair> = self.pairs.iter().map(|p| Pair::ordered(f(p.a), f(p.b))).collect();
        PairSet::new(self.dim, pairs).expect("vertex bijection preserves pair-set validity")
    }
}

impl Serialize for PairSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        crate::io::PairSetJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PairSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        crate::io::PairSetJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}

/// `enco(X)`: vertices all of whose neighbours lie in `X`.
pub fn enco(x: &[Vertex], dim: u8) -> Vec<Vertex> {
    let set: HashSet<u32> = x.iter().map(|v| v.bits()).collect();
    enco_bits(&set, dim).into_iter().map(|b| Vertex::from_raw(b, dim)).collect()
}

pub(crate) fn enco_bits(set: &HashSet<u32>, dim: u8) -> Vec<u32> {
    // Only neighbours of X can be encompassed.
    let mut cand: HashSet<u32> = HashSet::new();
    if dim as usize > set.len() {
        return Vec::new();
    }
    for &v in set {
        for j in 0..dim {
            cand.insert(v ^ (1 << j));
        }
    }
    let mut out: Vec<u32> =
        cand.into_iter().filter(|&c| (0..dim).all(|j| set.contains(&(c ^ (1 << j))))).collect();
    out.sort_unstable();
    out
}

/// `enc(X) = enco(X) \ X`.
pub fn enc(x: &[Vertex], dim: u8) -> Vec<Vertex> {
    let set: HashSet<Vertex> = x.iter().copied().collect();
    enco(x, dim).into_iter().filter(|v| !set.contains(v)).collect()
}

/// `ρ_{i=k}(A)` as a raw pair list; not necessarily a pair-set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub dim: u8,
    pub pairs: Vec<Pair>,
}

impl Projection {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// False exactly when nonempty and all pairs are degenerate.
    pub fn is_pair_set(&self) -> bool {
        self.pairs.is_empty() || self.pairs.iter().any(|p| !p.is_degenerate())
    }

    pub fn into_pair_set(self) -> Result<PairSet, PairSetError> {
        PairSet::new(self.dim, self.pairs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diminishability {
    pub diminishable: bool,
    pub reason: DimReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DimReason {
    Empty,
    SmallSize,
    SmallSizeWithEdgePair,
    NotInsideSubcube,
    InsideSubcube { coord: usize, k: u8 },
    FullSize,
    FullSizeInDimensionFour,
    TooFewEdgePairs(usize),
    Encompassed(Vec<Vertex>),
    TooLarge,
}

/// The three distinguished pairs of a bad coordinate, oriented so that
/// `alpha[0], alpha[1]` lie on side `k` and everything else on side `1 - k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadWitness {
    pub coord: usize,
    pub k: u8,
    pub pairs: [usize; 3],
    pub alpha: [Vertex; 3],
    pub beta: [Vertex; 3],
}
