//! Unpruned reference search used to cross-check the pruned one.

use super::{BaseError, Cube};
use crate::connector::Connector;
use crate::pairset::PairSet;

const MAX_NAIVE_DIM: u8 = 4;

struct Naive<'c> {
    cube: &'c Cube,
    ends: Vec<(u32, u32)>,
    size: usize,
    /// Failed states `(occupied, pair, current vertex)`, one bit each.
    failed: Vec<u64>,
    paths: Vec<Vec<u32>>,
}

impl Naive<'_> {
    fn slot(&self, occ: u64, k: usize, cur: u32) -> usize {
        ((occ as usize * self.ends.len()) + k) * self.size + cur as usize
    }

    fn go(&mut self, occ: u64, k: usize, cur: u32) -> bool {
        if k == self.ends.len() {
            return occ == self.cube.full();
        }
        let s = self.slot(occ, k, cur);
        if self.failed[s / 64] >> (s % 64) & 1 == 1 {
            return false;
        }
        let t = self.ends[k].1;
        let mut cand = self.cube.nb(cur);
        while cand != 0 {
            let w = cand.trailing_zeros();
            cand &= cand - 1;
            if w == t {
                self.paths[k].push(w);
                let next = self.ends.get(k + 1).map_or(0, |e| e.0);
                if self.go(occ, k + 1, next) {
                    return true;
                }
                self.paths[k].pop();
            } else if occ >> w & 1 == 0 {
                self.paths[k].push(w);
                if self.go(occ | 1 << w, k, w) {
                    return true;
                }
                self.paths[k].pop();
            }
        }
        self.failed[s / 64] |= 1 << (s % 64);
        false
    }
}

/// Plain depth-first search over all path systems with a failure memo and
/// no other pruning, for `n <= 4`. Returns a connector if one exists.
pub fn naive_connector(a: &PairSet) -> Result<Option<Connector>, BaseError> {
    let dim = a.dim();
    if dim > MAX_NAIVE_DIM {
        return Err(BaseError::DimensionTooLarge { dim, max: MAX_NAIVE_DIM });
    }
    let cube = Cube::new(dim);
    let raw = a.raw();
    let occ = raw.iter().fold(0u64, |m, &(x, y)| m | 1 << x | 1 << y);
    let ends: Vec<(u32, u32)> = raw.iter().copied().filter(|(x, y)| x != y).collect();
    let size = 1usize << dim;
    let states = (1usize << size) * ends.len().max(1) * size;
    let mut n = Naive {
        cube: &cube,
        ends: ends.clone(),
        size,
        failed: vec![0; states.div_ceil(64)],
        paths: ends.iter().map(|e| vec![e.0]).collect(),
    };
    let start = ends.first().map_or(0, |e| e.0);
    if !n.go(occ, 0, start) {
        return Ok(None);
    }
    let mut found = n.paths.into_iter();
    let paths = raw.iter().map(|&(x, y)| if x == y { vec![x] } else { found.next().unwrap() }).collect();
    Ok(Some(Connector::from_raw(dim, paths)))
}
