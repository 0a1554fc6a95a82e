//! Isomorphism classes of pair-sets under the automorphism group of `Q_n`.
//!
//! Every automorphism is a coordinate permutation followed by an XOR
//! translation, so the group has `2^n · n!` elements. Canonical forms are only
//! offered for `n <= 6`.

use std::sync::OnceLock;

use super::{PairSet, PairSetError};
use crate::hypercube::Vertex;

pub const MAX_CANONICAL_DIM: u8 = 6;

/// `x ↦ π(x) ⊕ t`, where `π` moves coordinate `j` to `perm[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    pub perm: Vec<u8>,
    pub translate: u32,
}

impl Automorphism {
    pub fn identity(dim: u8) -> Automorphism {
        Automorphism { perm: (0..dim).collect(), translate: 0 }
    }

    pub fn apply_bits(&self, x: u32) -> u32 {
        let mut y = 0;
        for (j, &p) in self.perm.iter().enumerate() {
            y |= ((x >> j) & 1) << p;
        }
        y ^ self.translate
    }

    pub fn apply(&self, v: Vertex) -> Vertex {
        Vertex::from_raw(self.apply_bits(v.bits()), v.dim())
    }

    pub fn apply_set(&self, a: &PairSet) -> PairSet {
        a.map(|v| self.apply(v))
    }
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n as u8).collect();
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

fn heap(k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for j in 0..k {
        heap(k - 1, cur, out);
        if k.is_multiple_of(2) {
            cur.swap(j, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

/// For each permutation of `[n]`, the table `x ↦ π(x)` over all of `V_n`.
fn perm_tables(dim: u8) -> &'static [Vec<u32>] {
    static TABLES: [OnceLock<Vec<Vec<u32>>>; MAX_CANONICAL_DIM as usize + 1] =
        [const { OnceLock::new() }; MAX_CANONICAL_DIM as usize + 1];
    TABLES[dim as usize].get_or_init(|| {
        permutations(dim as usize)
            .into_iter()
            .map(|perm| {
                let f = Automorphism { perm, translate: 0 };
                (0..1u32 << dim).map(|x| f.apply_bits(x)).collect()
            })
            .collect()
    })
}

pub fn automorphism_count(dim: u8) -> u64 {
    (1u64 << dim) * (1..=dim as u64).product::<u64>()
}

fn image(table: &[u32], t: u32, raw: &[(u32, u32)], buf: &mut Vec<(u32, u32)>) {
    buf.clear();
    buf.extend(raw.iter().map(|&(x, y)| {
        let (x, y) = (table[x as usize] ^ t, table[y as usize] ^ t);
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }));
    buf.sort_unstable();
}

/// Lexicographically least image of `raw` plus the size of its stabilizer.
pub(crate) fn canonical_raw(dim: u8, raw: &[(u32, u32)]) -> (Vec<(u32, u32)>, u64) {
    let tables = perm_tables(dim);
    let mut best: Option<Vec<(u32, u32)>> = None;
    let mut hits = 0u64;
    let mut buf = Vec::with_capacity(raw.len());
    // Translations that cannot map some endpoint to the smallest possible first
    // entry are still enumerated; the group is small enough.
    for table in tables {
        for t in 0..1u32 << dim {
            image(table, t, raw, &mut buf);
            match &best {
                Some(b) if buf > *b => {}
                Some(b) if buf == *b => hits += 1,
                _ => {
                    best = Some(buf.clone());
                    hits = 1;
                }
            }
        }
    }
    (best.unwrap_or_default(), hits)
}

/// The lexicographically least image of `A` under all automorphisms of `Q_n`.
pub fn canonical_form(a: &PairSet) -> Result<PairSet, PairSetError> {
    if a.dim() > MAX_CANONICAL_DIM {
        return Err(PairSetError::DimensionTooLarge(a.dim()));
    }
    let (raw, _) = canonical_raw(a.dim(), &a.raw());
    Ok(PairSet::from_raw_unchecked(a.dim(), raw))
}

impl PairSet {
    /// Number of distinct pair-sets isomorphic to this one.
    pub fn orbit_size(&self) -> Result<u64, PairSetError> {
        if self.dim() > MAX_CANONICAL_DIM {
            return Err(PairSetError::DimensionTooLarge(self.dim()));
        }
        let (_, stab) = canonical_raw(self.dim(), &self.raw());
        Ok(automorphism_count(self.dim()) / stab)
    }

    pub fn is_isomorphic(&self, other: &PairSet) -> Result<bool, PairSetError> {
        Ok(self.dim() == other.dim() && canonical_form(self)? == canonical_form(other)?)
    }
}

/// Every automorphism of `Q_dim`, for `dim <= 6`.
pub fn automorphisms(dim: u8) -> impl Iterator<Item = Automorphism> {
    assert!(dim <= MAX_CANONICAL_DIM);
    permutations(dim as usize)
        .into_iter()
        .flat_map(move |perm| (0..1u32 << dim).map(move |t| Automorphism { perm: perm.clone(), translate: t }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_sizes() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(automorphisms(3).count() as u64, automorphism_count(3));
        assert_eq!(automorphism_count(4), 384);
    }

    #[test]
    fn automorphisms_preserve_adjacency() {
        for f in automorphisms(3) {
            for x in 0..8u32 {
                for j in 0..3 {
                    let (a, b) = (f.apply_bits(x), f.apply_bits(x ^ 1 << j));
                    assert_eq!((a ^ b).count_ones(), 1);
                }
            }
        }
    }

    #[test]
    fn single_edges_share_a_form() {
        let forms: std::collections::HashSet<_> = (0..16u32)
            .flat_map(|x| (0..4).map(move |j| (x, x ^ 1 << j)))
            .map(|(x, y)| canonical_form(&PairSet::from_bits(4, &[(x, y)]).unwrap()).unwrap())
            .collect();
        assert_eq!(forms.len(), 1);
        let f = forms.into_iter().next().unwrap();
        assert_eq!(f.raw(), vec![(0, 1)]);
    }

    #[test]
    fn too_large() {
        let a = PairSet::from_bits(7, &[(0, 1)]).unwrap();
        assert_eq!(canonical_form(&a), Err(PairSetError::DimensionTooLarge(7)));
    }

    #[test]
    fn orbit_sizes_sum_to_labelled_count() {
        // Odd single pairs in Q_3: 4 * 4 = 16 unordered pairs in three classes
        // (distance 1 and 3).
        let mut seen = std::collections::HashMap::new();
        for x in 0..8u32 {
            for y in x + 1..8 {
                if (x ^ y).count_ones() % 2 == 1 {
                    let a = PairSet::from_bits(3, &[(x, y)]).unwrap();
                    seen.insert(canonical_form(&a).unwrap(), a.orbit_size().unwrap());
                }
            }
        }
        assert_eq!(seen.len(), 2);
        assert_eq!(seen.values().sum::<u64>(), 16);
    }
}
