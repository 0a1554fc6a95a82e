//! Connector surgery: solve one half, cut its paths open, solve a small
//! balanced pair-set on the other half that bridges the cuts, and glue.

use serde::Serialize;

use super::stitch::glue;
use crate::connector::Connector;
use crate::hypercube::rho_bits;
use crate::pairset::PairSet;

/// Path family of one half being cut apart.
#[derive(Debug, Clone)]
pub(crate) struct Cutter {
    pub(crate) paths: Vec<Vec<u32>>,
}

impl Cutter {
    pub(crate) fn new(c: &Connector) -> Cutter {
        Cutter { paths: c.raw_paths().to_vec() }
    }

    fn locate(&self, x: u32) -> Option<(usize, usize)> {
        self.paths.iter().enumerate().find_map(|(j, p)| p.iter().position(|&y| y == x).map(|k| (j, k)))
    }

    /// Make the interior vertex `x` a path of its own; returns its former
    /// neighbours.
    pub(crate) fn cut_vertex(&mut self, x: u32) -> Option<(u32, u32)> {
        let (j, k) = self.locate(x)?;
        let len = self.paths[j].len();
        if k == 0 || k + 1 == len {
            return None;
        }
        let tail = self.paths[j].split_off(k + 1);
        self.paths[j].pop();
        let before = self.paths[j][k - 1];
        let after = tail[0];
        self.paths.push(vec![x]);
        self.paths.push(tail);
        Some((before, after))
    }

    /// Split the path through the consecutive vertices `x`, `y` between them.
    pub(crate) fn cut_between(&mut self, x: u32, y: u32) -> bool {
        let Some((j, k)) = self.locate(x) else { return false };
        let p = &self.paths[j];
        let at = if k + 1 < p.len() && p[k + 1] == y {
            k + 1
        } else if k > 0 && p[k - 1] == y {
            k
        } else {
            return false;
        };
        let tail = self.paths[j].split_off(at);
        self.paths.push(tail);
        true
    }

    /// Edges of every path, in path order.
    pub(crate) fn edges(&self) -> impl Iterator<Item = (usize, u32, u32)> + '_ {
        self.paths.iter().enumerate().flat_map(|(j, p)| p.windows(2).map(move |w| (j, w[0], w[1])))
    }
}

/// How the lifted pair sits on the home connector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftCase {
    /// Endpoints on two different paths.
    A,
    /// Both on one path, not consecutive.
    B,
    /// Consecutive on one path.
    C,
}

/// Where a merged pair of split pairs was cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeCase {
    /// An edge avoiding both twins of the far endpoints.
    DisjointEdge,
    /// The path runs through both twins; cut next to the far end.
    ThroughTwins,
    /// The merged pair is an edge of its own.
    DirectEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum SurgeryKind {
    /// Nothing on the far side: cut one edge and fill the far side with a
    /// single path.
    EmptyHalf,
    /// Split pairs detached at their home endpoints.
    SplitVertex { splits: usize },
    /// One aligned pair moved to the far side.
    LiftPair { case: LiftCase, splits: usize },
    /// Two split pairs joined at home, then reopened at one edge.
    MergeSplit { case: MergeCase },
}

/// A planned surgery at coordinate `i` with home side `h`.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Plan {
    Lift { lifted: Option<usize> },
    Merge { p0: usize, p1: usize },
}

struct Sides {
    home: Vec<(u32, u32)>,
    far: Vec<(u32, u32)>,
    /// Split pairs as (home endpoint, far endpoint), projected.
    splits: Vec<(u32, u32)>,
}

fn sides(a: &PairSet, i: usize, h: u8, skip: &[usize]) -> Sides {
    let mut s = Sides { home: Vec::new(), far: Vec::new(), splits: Vec::new() };
    for (j, (x, y)) in a.raw().into_iter().enumerate() {
        if skip.contains(&j) {
            continue;
        }
        let (cx, cy) = ((x >> i & 1) as u8, (y >> i & 1) as u8);
        let (px, py) = (rho_bits(x, i), rho_bits(y, i));
        match (cx == h, cy == h) {
            (true, true) => s.home.push((px, py)),
            (false, false) => s.far.push((px, py)),
            (true, false) => s.splits.push((px, py)),
            (false, true) => s.splits.push((py, px)),
        }
    }
    s
}

/// Solver callback: a connector of the given pair-set or nothing.
pub(crate) type SubSolve<'a> = dyn FnMut(&PairSet, u64) -> Option<Connector> + 'a;

fn finish(
    a: &PairSet,
    i: usize,
    h: u8,
    cut: &Cutter,
    far: Vec<(u32, u32)>,
    seed: u64,
    solve: &mut SubSolve<'_>,
) -> Option<Connector> {
    let o = PairSet::try_from_raw(a.dim() - 1, far).ok()?;
    if o.is_empty() || !o.is_balanced() {
        return None;
    }
    let c = solve(&o, seed)?;
    glue(a, i, h, &cut.paths, c.raw_paths())
}

/// Detach every split pair at its home endpoint; the far side receives the
/// gap pair around the cut and the projected split pair.
fn detach_splits(cut: &mut Cutter, splits: &[(u32, u32)], far: &mut Vec<(u32, u32)>) -> Option<()> {
    for &(x, y) in splits {
        let (p, q) = cut.cut_vertex(x)?;
        far.push((p, q));
        far.push((x, y));
    }
    Some(())
}

/// Run `plan` at coordinate `i` with home side `h`.
pub(crate) fn run(
    a: &PairSet,
    i: usize,
    h: u8,
    plan: Plan,
    seed: u64,
    solve: &mut SubSolve<'_>,
) -> Option<(Connector, SurgeryKind)> {
    let dim = a.dim() - 1;
    match plan {
        Plan::Lift { lifted } => {
            let skip: Vec<usize> = lifted.into_iter().collect();
            let s = sides(a, i, h, &skip);
            let home = PairSet::try_from_raw(dim, s.home.iter().copied()).ok()?;
            if home.is_empty() {
                return None;
            }
            let base = solve(&home, seed)?;
            let mut cut = Cutter::new(&base);
            let mut far = s.far.clone();
            detach_splits(&mut cut, &s.splits, &mut far)?;
            let kind = match lifted {
                Some(j) => {
                    let (x, y) = a.raw()[j];
                    let (x, y) = (rho_bits(x, i), rho_bits(y, i));
                    let case = lift_pair(&mut cut, x, y, &mut far)?;
                    SurgeryKind::LiftPair { case, splits: s.splits.len() }
                }
                None if far.is_empty() => {
                    let edges: Vec<(u32, u32)> = cut.edges().map(|(_, u, v)| (u, v)).collect();
                    if edges.is_empty() {
                        return None;
                    }
                    let (u, v) = edges[(seed % edges.len() as u64) as usize];
                    cut.cut_between(u, v);
                    far.push((u, v));
                    SurgeryKind::EmptyHalf
                }
                None => SurgeryKind::SplitVertex { splits: s.splits.len() },
            };
            let c = finish(a, i, h, &cut, far, seed ^ 0x5eed, solve)?;
            Some((c, kind))
        }
        Plan::Merge { p0, p1 } => merge_split(a, i, h, p0, p1, seed, solve),
    }
}

/// Move the pair `{x, y}` of the home half to the far side.
fn lift_pair(cut: &mut Cutter, x: u32, y: u32, far: &mut Vec<(u32, u32)>) -> Option<LiftCase> {
    let (jx, kx) = cut.locate(x)?;
    let (jy, ky) = cut.locate(y)?;
    if jx == jy && kx.abs_diff(ky) == 1 {
        let p = &cut.paths[jx];
        let (lo, hi) = (kx.min(ky), kx.max(ky));
        if lo == 0 || hi + 1 == p.len() {
            return None;
        }
        let (zeta, zeta2) = (p[lo - 1], p[hi + 1]);
        let (first, second) = (p[lo], p[hi]);
        cut.cut_between(zeta, first);
        cut.cut_between(second, zeta2);
        far.push((zeta, zeta2));
        return Some(LiftCase::C);
    }
    let case = if jx == jy { LiftCase::B } else { LiftCase::A };
    let gap_x = cut.cut_vertex(x)?;
    let gap_y = cut.cut_vertex(y)?;
    far.extend([gap_x, gap_y, (x, y)]);
    Some(case)
}

/// Join the home endpoints of split pairs `p0`, `p1` into one home pair,
/// solve, then reopen its path at an edge `{γ, γ'}` and send both far
/// endpoints to the cut through the far side.
fn merge_split(
    a: &PairSet,
    i: usize,
    h: u8,
    p0: usize,
    p1: usize,
    seed: u64,
    solve: &mut SubSolve<'_>,
) -> Option<(Connector, SurgeryKind)> {
    let dim = a.dim() - 1;
    let raw = a.raw();
    let split = |j: usize| {
        let (x, y) = raw[j];
        if (x >> i & 1) as u8 == h {
            (rho_bits(x, i), rho_bits(y, i))
        } else {
            (rho_bits(y, i), rho_bits(x, i))
        }
    };
    let ((a0, b0), (a1, b1)) = (split(p0), split(p1));
    let s = sides(a, i, h, &[p0, p1]);
    let mut home_raw = s.home.clone();
    home_raw.push((a0, a1));
    let home = PairSet::try_from_raw(dim, home_raw).ok()?;
    if !home.is_balanced() {
        return None;
    }
    let base = solve(&home, seed)?;
    let mut start = Cutter::new(&base);
    let mut far0 = s.far.clone();
    detach_splits(&mut start, &s.splits, &mut far0)?;
    let path: Vec<u32> = start.paths.iter().find(|p| {
        let (x, y) = (p[0], p[p.len() - 1]);
        (x, y) == (a0, a1) || (x, y) == (a1, a0)
    })?.clone();
    let path: Vec<u32> = if path[0] == a0 { path } else { path.into_iter().rev().collect() };
    let twins = [b0, b1];
    let mut order: Vec<(usize, MergeCase)> = Vec::new();
    let edges = path.len() - 1;
    for k in 0..edges {
        if !twins.contains(&path[k]) && !twins.contains(&path[k + 1]) {
            order.push((k, if edges == 1 { MergeCase::DirectEdge } else { MergeCase::DisjointEdge }));
        }
    }
    order.truncate(3);
    for k in 0..edges {
        if twins.contains(&path[k]) || twins.contains(&path[k + 1]) {
            let case = if edges == 1 { MergeCase::DirectEdge } else { MergeCase::ThroughTwins };
            order.push((k, case));
        }
    }
    for (attempt, (k, case)) in order.into_iter().enumerate() {
        let (g, g2) = (path[k], path[k + 1]);
        let mut cut = start.clone();
        if !cut.cut_between(g, g2) {
            continue;
        }
        let mut far = far0.clone();
        far.push((b0, g));
        far.push((b1, g2));
        if far.iter().all(|(x, y)| x == y) {
            // Only singletons would be left on the far side: open one more
            // edge elsewhere to give them room.
            let Some((_, u, v)) = cut.edges().find(|&(_, u, v)| ![g, g2, b0, b1].contains(&u) && ![g, g2, b0, b1].contains(&v))
            else {
                continue;
            };
            cut.cut_between(u, v);
            far.push((u, v));
        }
        if let Some(c) = finish(a, i, h, &cut, far, seed.wrapping_add(attempt as u64 + 1), solve) {
            return Some((c, SurgeryKind::MergeSplit { case }));
        }
    }
    None
}
