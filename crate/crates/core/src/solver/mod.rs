//! The inductive solver.
//!
//! Each level splits the cube along a coordinate. A completion turns the
//! input into a pair-set whose pairs all lie inside one half, both halves
//! are solved recursively and the results stitched back along the merge
//! script. Inputs that no completion splits nicely go through connector
//! surgery, then through a budgeted exhaustive search. Every positive answer
//! is checked by [`crate::verify::check`] before it leaves this module.

mod stitch;
mod surgery;

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::Serialize;

use crate::basesolver::{self, CensusFilter, CensusScope, Exhaustion, SearchOutcome};
use crate::completion::{self, CompletionError, CompletionOptions, CompletionTrace, EncFilter};
use crate::connector::Connector;
use crate::hypercube::Vertex;
use crate::pairset::canonical::canonical_raw;
use crate::pairset::{Pair, PairSet, PairSetError};
use crate::verify;

pub use stitch::{stitch, StitchError};
pub use surgery::{LiftCase, MergeCase, SurgeryKind};

use surgery::Plan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveConfig {
    pub seed: u64,
    /// Completion seeds tried per coordinate.
    pub retries: u32,
    /// Node budget of the last-resort exhaustive search (dimension <= 6).
    pub fallback_budget: u64,
    /// Node budget for searches in dimension 5.
    pub base_budget: u64,
    /// Recursive attempts per level before giving up on a strategy.
    pub fanout: u32,
    /// Treat an even pair as an obstruction instead of solving best-effort.
    pub require_odd: bool,
    /// Solve the two halves of a split on separate threads.
    pub parallel: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 0,
            retries: 32,
            fallback_budget: 5_000_000,
            base_budget: 20_000_000,
            fanout: 6,
            require_odd: false,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Obstruction {
    Unbalanced { chi: i32 },
    EvenPair { pair: Pair },
    /// Vertices outside `⋃A` whose neighbours all lie in `⋃A`.
    EncObstruction { vertices: Vec<Vertex> },
    /// The exceptional three-pair set of `Q_4`.
    #[serde(rename = "C2")]
    C2,
    Exhaustive { exhaustion: Exhaustion },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Connected { connector: Connector },
    NonConnectable {
        #[serde(flatten)]
        obstruction: Obstruction,
    },
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    Search,
    Completion { coord: usize, attempt: u32 },
    Surgery { coord: usize, home: u8, surgery: SurgeryKind },
    Fallback,
    Obstruction,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrailEntry {
    pub depth: u32,
    pub dim: u8,
    pub pairs: usize,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Completions that produced a usable split.
    pub completions: u64,
    /// Completion attempts that failed or were discarded.
    pub retries: u64,
    pub surgeries: u64,
    pub fallbacks: u64,
    pub searches: u64,
    pub nodes: u64,
    pub max_depth: u32,
}

impl SolveStats {
    fn absorb(&mut self, o: &SolveStats) {
        self.completions += o.completions;
        self.retries += o.retries;
        self.surgeries += o.surgeries;
        self.fallbacks += o.fallbacks;
        self.searches += o.searches;
        self.nodes += o.nodes;
        self.max_depth = self.max_depth.max(o.max_depth);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub trail: Vec<TrailEntry>,
    pub stats: SolveStats,
}

impl SolveReport {
    pub fn connector(&self) -> Option<&Connector> {
        match &self.verdict {
            Verdict::Connected { connector } => Some(connector),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrayError {
    #[error("endpoints {0} and {1} have equal parity")]
    EvenDistance(Vertex, Vertex),
    #[error("endpoints live in different dimensions")]
    DimensionMismatch,
    #[error(transparent)]
    PairSet(#[from] PairSetError),
    #[error("no path found")]
    Unresolved,
}

/// Canonical forms of the non-connectable odd pair-sets of `Q_4` with at
/// most three pairs, found by census on first use.
fn c2_forms() -> &'static HashSet<Vec<(u32, u32)>> {
    static FORMS: OnceLock<HashSet<Vec<(u32, u32)>>> = OnceLock::new();
    FORMS.get_or_init(|| {
        let census = basesolver::enumerate_classes(4, CensusFilter::odd(1, 3), CensusScope::Exhaustive)
            .expect("dimension 4 census");
        census.non_connectable().map(|r| r.class.raw()).collect()
    })
}

/// Whether `a` is isomorphic to the exceptional set `C_2` of `Q_4`.
pub fn is_c2(a: &PairSet) -> bool {
    a.dim() == 4 && a.len() == 3 && a.is_odd() && c2_forms().contains(&canonical_raw(4, &a.raw()).0)
}

/// A fixed obstruction, if `a` has one that needs no search.
pub fn obstruction(a: &PairSet, require_odd: bool) -> Option<Obstruction> {
    if !a.is_balanced() {
        return Some(Obstruction::Unbalanced { chi: a.chi() });
    }
    if require_odd {
        if let Some(p) = a.pairs().iter().find(|p| !p.is_odd()) {
            return Some(Obstruction::EvenPair { pair: *p });
        }
    }
    if a.is_odd() {
        let enc = a.enc();
        if !enc.is_empty() {
            return Some(Obstruction::EncObstruction { vertices: enc });
        }
        if is_c2(a) {
            return Some(Obstruction::C2);
        }
    }
    None
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xc2b2_ae3d_27d4_eb4f);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Result of one recursive call.
struct Sub {
    verdict: Verdict,
    trail: Vec<TrailEntry>,
    stats: SolveStats,
}

impl Sub {
    fn new() -> Sub {
        Sub { verdict: Verdict::Unresolved, trail: Vec::new(), stats: SolveStats::default() }
    }

    fn absorb(&mut self, o: Sub) {
        self.trail.extend(o.trail);
        self.stats.absorb(&o.stats);
    }

    fn done(mut self, a: &PairSet, depth: u32, strategy: Strategy, verdict: Verdict) -> Sub {
        self.trail.push(TrailEntry { depth, dim: a.dim(), pairs: a.len(), strategy });
        self.stats.max_depth = self.stats.max_depth.max(depth);
        self.verdict = verdict;
        self
    }
}

/// How promising a half is: 0 is backed by theory (or decided by search),
/// 1 is a gamble, `None` is known to fail.
fn tier(h: &PairSet) -> Option<u8> {
    if !h.is_balanced() {
        return None;
    }
    if h.is_odd() {
        if !h.enc().is_empty() || is_c2(h) {
            return None;
        }
        if h.diminishable() || h.dim() <= 4 {
            return Some(0);
        }
        return Some(1);
    }
    Some(if h.dim() <= 5 { 0 } else { 1 })
}

struct Ctx<'a> {
    cfg: &'a SolveConfig,
}

impl Ctx<'_> {
    fn search(&self, a: &PairSet, budget: Option<u64>, depth: u32, strategy: Strategy) -> Sub {
        let mut sub = Sub::new();
        sub.stats.searches += 1;
        let Ok(res) = basesolver::search_connector(a, budget) else {
            return sub.done(a, depth, Strategy::Unresolved, Verdict::Unresolved);
        };
        sub.stats.nodes += res.nodes;
        match res.outcome {
            SearchOutcome::Connected(connector) => sub.done(a, depth, strategy, Verdict::Connected { connector }),
            SearchOutcome::NonConnectable(exhaustion) => sub.done(
                a,
                depth,
                strategy,
                Verdict::NonConnectable { obstruction: Obstruction::Exhaustive { exhaustion } },
            ),
            SearchOutcome::BudgetExceeded { .. } => sub.done(a, depth, Strategy::Unresolved, Verdict::Unresolved),
        }
    }

    fn solve(&self, a: &PairSet, seed: u64, depth: u32) -> Sub {
        let n = a.dim();
        if let Some(obstruction) = obstruction(a, false) {
            return Sub::new().done(a, depth, Strategy::Obstruction, Verdict::NonConnectable { obstruction });
        }
        if n <= 4 {
            return self.search(a, None, depth, Strategy::Search);
        }
        if n == 5 {
            return self.search(a, Some(self.cfg.base_budget), depth, Strategy::Search);
        }
        let mut sub = Sub::new();
        if let Some(found) = self.ladder(a, seed, depth, &mut sub) {
            return found;
        }
        if n <= basesolver::MAX_SEARCH_DIM {
            sub.stats.fallbacks += 1;
            let s = self.search(a, Some(self.cfg.fallback_budget), depth, Strategy::Fallback);
            if matches!(s.verdict, Verdict::Connected { .. }) {
                let mut out = s;
                out.stats.absorb(&sub.stats);
                return out;
            }
            sub.stats.absorb(&s.stats);
        }
        let stats = sub.stats;
        let mut out = Sub::new();
        out.stats = stats;
        out.done(a, depth, Strategy::Unresolved, Verdict::Unresolved)
    }

    /// Coordinates ordered by how evenly they split the aligned pairs.
    fn coordinates(a: &PairSet) -> Vec<usize> {
        let mut coords: Vec<usize> = (0..a.dim() as usize).collect();
        coords.sort_by_key(|&i| {
            let (n0, n1) = a.sigma(i);
            (std::cmp::Reverse(n0.min(n1)), std::cmp::Reverse(a.split_count(i)), i)
        });
        coords
    }

    fn ladder(&self, a: &PairSet, seed: u64, depth: u32, acc: &mut Sub) -> Option<Sub> {
        if a.len() == 1 {
            return self.single(a, seed, depth, acc);
        }
        let mut gambles: Vec<(CompletionTrace, u32)> = Vec::new();
        let mut tries = 0;
        for i in Self::coordinates(a) {
            for s in 0..self.cfg.retries {
                let opts = CompletionOptions { seed: mix(seed, i as u64, s as u64), prefer_edges: true, enc: EncFilter::Soft, ..Default::default() };
                let trace = match completion::complete_random(a, i, &opts) {
                    Ok(t) => t,
                    Err(CompletionError::Failure { .. }) => {
                        acc.stats.retries += 1;
                        continue;
                    }
                    Err(_) => break,
                };
                let (Some(h0), Some(h1)) = (trace.half(0), trace.half(1)) else { break };
                let deterministic = trace.steps.iter().all(|st| st.chosen.is_empty());
                match (tier(&h0), tier(&h1)) {
                    (Some(0), Some(0)) => {
                        tries += 1;
                        if let Some(found) = self.split(&trace, h0, h1, s, seed, depth, acc) {
                            return Some(found);
                        }
                        if tries >= self.cfg.fanout {
                            break;
                        }
                    }
                    (Some(_), Some(_)) if gambles.len() < self.cfg.fanout as usize => gambles.push((trace, s)),
                    _ => acc.stats.retries += 1,
                }
                if deterministic {
                    break;
                }
            }
            if tries >= self.cfg.fanout {
                break;
            }
        }
        if let Some(found) = self.special(a, seed, depth, acc) {
            return Some(found);
        }
        for (trace, s) in gambles {
            let (h0, h1) = (trace.half(0)?, trace.half(1)?);
            if let Some(found) = self.split(&trace, h0, h1, s, seed, depth, acc) {
                return Some(found);
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn split(&self, trace: &CompletionTrace, h0: PairSet, h1: PairSet, attempt: u32, seed: u64, depth: u32, acc: &mut Sub) -> Option<Sub> {
        let i = trace.coord;
        let s0 = mix(seed, 0x100 + i as u64, attempt as u64);
        let s1 = mix(seed, 0x200 + i as u64, attempt as u64);
        let (r0, r1) = if self.cfg.parallel && trace.input.dim() >= 8 {
            rayon::join(|| self.solve(&h0, s0, depth + 1), || self.solve(&h1, s1, depth + 1))
        } else {
            (self.solve(&h0, s0, depth + 1), self.solve(&h1, s1, depth + 1))
        };
        let c0 = match &r0.verdict {
            Verdict::Connected { connector } => Some(connector.clone()),
            _ => None,
        };
        let c1 = match &r1.verdict {
            Verdict::Connected { connector } => Some(connector.clone()),
            _ => None,
        };
        let ok = c0.is_some() && c1.is_some();
        let mut sub = Sub::new();
        sub.absorb(r0);
        sub.absorb(r1);
        if ok {
            if let Ok(connector) = stitch(trace, c0.as_ref(), c1.as_ref()) {
                let mut out = Sub::new();
                out.stats = acc.stats;
                out.stats.completions += 1;
                out.absorb(sub);
                let strategy = Strategy::Completion { coord: i, attempt };
                return Some(out.done(&trace.input, depth, strategy, Verdict::Connected { connector }));
            }
        }
        acc.stats.retries += 1;
        acc.stats.absorb(&sub.stats);
        None
    }

    /// A single pair: split where its endpoints agree, or complete anywhere.
    fn single(&self, a: &PairSet, seed: u64, depth: u32, acc: &mut Sub) -> Option<Sub> {
        let p = a.pairs()[0];
        let agree = (0..a.dim() as usize).find(|&i| p.a().coord(i) == p.b().coord(i));
        match agree {
            Some(i) => self.surgery(a, i, p.a().coord(i), Plan::Lift { lifted: None }, seed, depth, acc),
            None => {
                for s in 0..self.cfg.retries {
                    let opts = CompletionOptions { seed: mix(seed, 0, s as u64), ..Default::default() };
                    let Ok(trace) = completion::complete_random(a, 0, &opts) else { continue };
                    let (Some(h0), Some(h1)) = (trace.half(0), trace.half(1)) else { continue };
                    if let Some(found) = self.split(&trace, h0, h1, s, seed, depth, acc) {
                        return Some(found);
                    }
                }
                None
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn surgery(&self, a: &PairSet, i: usize, h: u8, plan: Plan, seed: u64, depth: u32, acc: &mut Sub) -> Option<Sub> {
        let mut inner = Sub::new();
        let mut calls = 0u64;
        let result = {
            let mut solve = |x: &PairSet, s: u64| -> Option<Connector> {
                calls += 1;
                let r = self.solve(x, mix(seed, s, calls), depth + 1);
                let c = match &r.verdict {
                    Verdict::Connected { connector } => Some(connector.clone()),
                    _ => None,
                };
                inner.absorb(r);
                c
            };
            surgery::run(a, i, h, plan, seed, &mut solve)
        };
        match result {
            Some((connector, kind)) => {
                let mut out = Sub::new();
                out.stats = acc.stats;
                out.stats.surgeries += 1;
                out.absorb(inner);
                let strategy = Strategy::Surgery { coord: i, home: h, surgery: kind };
                Some(out.done(a, depth, strategy, Verdict::Connected { connector }))
            }
            None => {
                acc.stats.absorb(&inner.stats);
                None
            }
        }
    }

    /// Surgery routes for sets that no completion splits into two good halves.
    fn special(&self, a: &PairSet, seed: u64, depth: u32, acc: &mut Sub) -> Option<Sub> {
        let raw = a.raw();
        let mut plans: Vec<(usize, u8, Plan)> = Vec::new();
        for i in Self::coordinates(a) {
            let bit = |x: u32| (x >> i & 1) as u8;
            for h in 0..2u8 {
                let home: Vec<usize> = (0..raw.len()).filter(|&j| bit(raw[j].0) == h && bit(raw[j].1) == h).collect();
                let splits: Vec<usize> = (0..raw.len()).filter(|&j| bit(raw[j].0) != bit(raw[j].1)).collect();
                if home.is_empty() {
                    continue;
                }
                for &j in &home {
                    if home.len() > 1 {
                        plans.push((i, h, Plan::Lift { lifted: Some(j) }));
                    }
                }
                plans.push((i, h, Plan::Lift { lifted: None }));
                for (x, &p0) in splits.iter().enumerate() {
                    for &p1 in &splits[x + 1..] {
                        let home_end = |j: usize| if bit(raw[j].0) == h { raw[j].0 } else { raw[j].1 };
                        if (home_end(p0) ^ home_end(p1)).count_ones() % 2 == 1 {
                            plans.push((i, h, Plan::Merge { p0, p1 }));
                        }
                    }
                }
            }
        }
        let limit = (self.cfg.fanout as usize) * 4;
        for (k, (i, h, plan)) in plans.into_iter().take(limit).enumerate() {
            if let Some(found) = self.surgery(a, i, h, plan, mix(seed, 0x300 + k as u64, 0), depth, acc) {
                return Some(found);
            }
        }
        None
    }
}

/// Solve `a`: a verified connector, a recognised obstruction, or
/// `Unresolved` when every strategy ran out.
pub fn solve(a: &PairSet, cfg: &SolveConfig) -> Result<SolveReport, SolveError> {
    if a.is_empty() {
        return Err(SolveError::InvalidInput("empty pair-set".into()));
    }
    if let Some(obstruction) = obstruction(a, cfg.require_odd) {
        return Ok(SolveReport {
            verdict: Verdict::NonConnectable { obstruction },
            trail: vec![TrailEntry { depth: 0, dim: a.dim(), pairs: a.len(), strategy: Strategy::Obstruction }],
            stats: SolveStats::default(),
        });
    }
    let ctx = Ctx { cfg };
    let mut sub = ctx.solve(a, cfg.seed, 0);
    if let Verdict::Connected { connector } = &sub.verdict {
        if verify::check(a, connector).is_err() {
            sub.verdict = Verdict::Unresolved;
        }
    }
    sub.trail.sort_by_key(|t| t.depth);
    Ok(SolveReport { verdict: sub.verdict, trail: sub.trail, stats: sub.stats })
}

/// A Hamiltonian path of `Q_n` from `from` to `to`.
pub fn gray_path(from: Vertex, to: Vertex, seed: u64) -> Result<Vec<Vertex>, GrayError> {
    if from.dim() != to.dim() {
        return Err(GrayError::DimensionMismatch);
    }
    if from.parity() == to.parity() {
        return Err(GrayError::EvenDistance(from, to));
    }
    let a = PairSet::new(from.dim(), vec![Pair::new(from, to)?])?;
    let cfg = SolveConfig { seed, ..Default::default() };
    let report = solve(&a, &cfg).map_err(|_| GrayError::Unresolved)?;
    let c = report.connector().ok_or(GrayError::Unresolved)?;
    let mut path = c.path(0);
    if path[0] != from {
        path.reverse();
    }
    Ok(path)
}

#[cfg(test)]
mod tests;
