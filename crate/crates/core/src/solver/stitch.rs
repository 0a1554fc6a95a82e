//! Putting half-cube connectors back together.

use std::collections::HashMap;

use crate::completion::CompletionTrace;
use crate::connector::Connector;
use crate::hypercube::iota_bits;
use crate::pairset::{MergeEdge, PairSet};
use crate::verify::{self, Violation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StitchError {
    #[error("connector for side {side} does not match the projected pair-set")]
    WrongSubproblem { side: u8 },
    #[error("merge edge {0:?} does not join two path ends")]
    BadMerge(MergeEdge),
    #[error("stitched family is not a connector: {0}")]
    Invalid(Violation),
}

fn key(path: &[u32]) -> (u32, u32) {
    let (x, y) = (path[0], path[path.len() - 1]);
    (x.min(y), x.max(y))
}

fn matches(expected: Option<&PairSet>, c: Option<&Connector>) -> bool {
    match (expected, c) {
        (None, None) => true,
        (Some(p), Some(c)) => {
            let mut want: Vec<(u32, u32)> = p.raw();
            let mut got: Vec<(u32, u32)> = c.raw_paths().iter().filter(|q| !q.is_empty()).map(|q| key(q)).collect();
            want.sort_unstable();
            got.sort_unstable();
            c.dim() == p.dim() && want == got
        }
        (None, Some(c)) => c.is_empty(),
        (Some(_), None) => false,
    }
}

/// Lift each path of a connector of a half into `Q_n`.
pub(crate) fn lift(paths: &[Vec<u32>], i: usize, side: u8) -> impl Iterator<Item = Vec<u32>> + '_ {
    paths.iter().map(move |p| p.iter().map(|&x| iota_bits(x, i, side as u32)).collect())
}

/// Order `paths` to follow the pairs of `a`; `None` if some pair has no path.
fn order_like(a: &PairSet, paths: Vec<Vec<u32>>) -> Option<Vec<Vec<u32>>> {
    let mut by_key: HashMap<(u32, u32), Vec<u32>> = paths.into_iter().map(|p| (key(&p), p)).collect();
    a.raw().into_iter().map(|k| by_key.remove(&k)).collect()
}

/// Connector of `trace.input` from connectors of the two halves of
/// `trace.output`, by replaying the merge script.
pub fn stitch(trace: &CompletionTrace, c0: Option<&Connector>, c1: Option<&Connector>) -> Result<Connector, StitchError> {
    let i = trace.coord;
    let a = &trace.input;
    for (side, c) in [(0u8, c0), (1u8, c1)] {
        if !matches(trace.half(side).as_ref(), c) {
            return Err(StitchError::WrongSubproblem { side });
        }
    }
    let mut paths: Vec<Option<Vec<u32>>> = Vec::new();
    for (side, c) in [(0u8, c0), (1u8, c1)] {
        if let Some(c) = c {
            paths.extend(lift(c.raw_paths(), i, side).map(Some));
        }
    }
    let mut end_of: HashMap<u32, usize> = HashMap::new();
    for (j, p) in paths.iter().enumerate() {
        let p = p.as_ref().expect("fresh");
        end_of.insert(p[0], j);
        end_of.insert(p[p.len() - 1], j);
    }
    for &edge in &trace.merge_script {
        let (u, v) = (edge.0.bits(), edge.1.bits());
        let (Some(&p), Some(&q)) = (end_of.get(&u), end_of.get(&v)) else {
            return Err(StitchError::BadMerge(edge));
        };
        if p == q {
            return Err(StitchError::BadMerge(edge));
        }
        let mut first = paths[p].take().expect("live path");
        let mut second = paths[q].take().expect("live path");
        if first[first.len() - 1] != u {
            first.reverse();
        }
        if second[0] != v {
            second.reverse();
        }
        end_of.remove(&u);
        end_of.remove(&v);
        first.extend(second);
        let (s, t) = (first[0], first[first.len() - 1]);
        end_of.insert(s, p);
        end_of.insert(t, p);
        paths[p] = Some(first);
    }
    let live: Vec<Vec<u32>> = paths.into_iter().flatten().collect();
    let ordered = order_like(a, live).ok_or_else(|| {
        StitchError::Invalid(Violation::PathCount { pairs: a.len(), paths: 0 })
    })?;
    let c = Connector::from_raw(a.dim(), ordered);
    verify::check(a, &c).map_err(StitchError::Invalid)?;
    Ok(c)
}

/// Join the lifted path families of both halves into a connector of `a`
/// using only `i`-edges. A vertex that is short of path-neighbours (an
/// endpoint of `a` with none, or any other vertex with one) is joined to its
/// twin across `i`, which must be short in the same way.
pub(crate) fn glue(a: &PairSet, i: usize, home: u8, home_paths: &[Vec<u32>], other_paths: &[Vec<u32>]) -> Option<Connector> {
    const NONE: u32 = u32::MAX;
    let n = a.dim();
    let size = 1usize << n;
    let mut nbr = vec![[NONE; 2]; size];
    let mut deg = vec![0u8; size];
    let link = |x: u32, y: u32, nbr: &mut Vec<[u32; 2]>, deg: &mut Vec<u8>| -> bool {
        for (u, w) in [(x, y), (y, x)] {
            let d = deg[u as usize] as usize;
            if d >= 2 {
                return false;
            }
            nbr[u as usize][d] = w;
            deg[u as usize] += 1;
        }
        true
    };
    let mut seen = vec![false; size];
    for p in lift(home_paths, i, home).chain(lift(other_paths, i, 1 - home)) {
        for &x in &p {
            if std::mem::replace(&mut seen[x as usize], true) {
                return None;
            }
        }
        for w in p.windows(2) {
            if !link(w[0], w[1], &mut nbr, &mut deg) {
                return None;
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return None;
    }
    let mut need = vec![2u8; size];
    for (x, y) in a.raw() {
        need[x as usize] = if x == y { 0 } else { 1 };
        need[y as usize] = need[x as usize];
    }
    let bit = 1u32 << i;
    for v in 0..size as u32 {
        let short = need[v as usize] as i32 - deg[v as usize] as i32;
        match short {
            0 => {}
            1 => {
                let w = v ^ bit;
                if w > v {
                    if need[w as usize] as i32 - deg[w as usize] as i32 != 1 || !link(v, w, &mut nbr, &mut deg) {
                        return None;
                    }
                } else if deg[v as usize] != need[v as usize] {
                    return None;
                }
            }
            _ => return None,
        }
    }
    let mut paths = Vec::with_capacity(a.len());
    for (x, y) in a.raw() {
        let mut path = vec![x];
        let (mut prev, mut cur) = (NONE, x);
        while cur != y {
            let next = nbr[cur as usize].into_iter().find(|&w| w != NONE && w != prev)?;
            path.push(next);
            if path.len() > size {
                return None;
            }
            prev = cur;
            cur = next;
        }
        paths.push(path);
    }
    let c = Connector::from_raw(n, paths);
    verify::check(a, &c).ok().map(|_| c)
}
