//! `(A, i)`-matchings: a perfect matching of the even pairs of a balanced
//! pair-set into couples of opposite sign.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{PairSet, PairSetError};

/// Couples of indices into the pair-set's (sorted) pair list.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Matching {
    pub couples: Vec<(usize, usize)>,
}

impl Matching {
    /// Check that this is an `(A, i)`-matching.
    pub fn validate(&self, a: &PairSet, i: usize) -> Result<(), PairSetError> {
        let bad = |msg: String| Err(PairSetError::BadMatching(msg));
        let mut used = vec![false; a.len()];
        for &(x, y) in &self.couples {
            let (Some(p), Some(q)) = (a.pairs.get(x), a.pairs.get(y)) else {
                return bad(format!("index out of range in couple ({x}, {y})"));
            };
            if x == y || used[x] || used[y] {
                return bad(format!("pair index reused in couple ({x}, {y})"));
            }
            used[x] = true;
            used[y] = true;
            if p.is_odd() || q.is_odd() {
                return bad(format!("couple ({x}, {y}) contains an odd pair"));
            }
            if p.chi() + q.chi() != 0 {
                return bad(format!("couple ({x}, {y}) has equal signs"));
            }
            if p.is_degenerate() && q.is_degenerate() && p.a.coord(i) != q.a.coord(i) {
                return bad(format!("degenerate couple ({x}, {y}) disagrees at coordinate {i}"));
            }
        }
        if let Some(x) = (0..a.len()).find(|&x| !used[x] && !a.pairs[x].is_odd()) {
            return bad(format!("even pair {x} is unmatched"));
        }
        Ok(())
    }
}

/// A deterministic `(A, i)`-matching.
pub fn build_matching(a: &PairSet, i: usize) -> Result<Matching, PairSetError> {
    matching_impl(a, i, None::<&mut rand_chacha::ChaCha8Rng>)
}

/// A randomized `(A, i)`-matching; different seeds explore different couples.
pub fn build_matching_with<R: Rng>(a: &PairSet, i: usize, rng: &mut R) -> Result<Matching, PairSetError> {
    matching_impl(a, i, Some(rng))
}

fn matching_impl<R: Rng>(a: &PairSet, i: usize, rng: Option<&mut R>) -> Result<Matching, PairSetError> {
    if !a.is_balanced() {
        return Err(PairSetError::Unbalanced(a.chi()));
    }
    let mut plus: Vec<usize> = (0..a.len()).filter(|&x| a.pairs[x].chi() == 2).collect();
    let mut minus: Vec<usize> = (0..a.len()).filter(|&x| a.pairs[x].chi() == -2).collect();
    debug_assert_eq!(plus.len(), minus.len());
    if let Some(r) = rng {
        plus.shuffle(r);
        minus.shuffle(r);
    }
    let compatible = |x: usize, y: usize| {
        let (p, q) = (&a.pairs[x], &a.pairs[y]);
        !(p.is_degenerate() && q.is_degenerate()) || p.a.coord(i) == q.a.coord(i)
    };
    // Kuhn's augmenting paths; degenerate plus-pairs first since they are the
    // constrained ones.
    plus.sort_by_key(|&x| !a.pairs[x].is_degenerate());
    let mut owner: Vec<Option<usize>> = vec![None; minus.len()];
    for px in 0..plus.len() {
        let mut seen = vec![false; minus.len()];
        if !augment(px, &plus, &minus, &compatible, &mut owner, &mut seen) {
            return Err(PairSetError::ConstraintInfeasibleAtI(i));
        }
    }
    let mut couples: Vec<(usize, usize)> = owner
        .iter()
        .enumerate()
        .map(|(my, o)| {
            let (x, y) = (plus[o.expect("perfect matching")], minus[my]);
            (x.min(y), x.max(y))
        })
        .collect();
    couples.sort_unstable();
    Ok(Matching { couples })
}

fn augment(
    px: usize,
    plus: &[usize],
    minus: &[usize],
    compatible: &impl Fn(usize, usize) -> bool,
    owner: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for my in 0..minus.len() {
        if seen[my] || !compatible(plus[px], minus[my]) {
            continue;
        }
        seen[my] = true;
        let free = match owner[my] {
            None => true,
            Some(other) => augment(other, plus, minus, compatible, owner, seen),
        };
        if free {
            owner[my] = Some(px);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn odd_sets_have_empty_matchings() {
        let a = PairSet::from_bits(3, &[(0, 1), (2, 6)]).unwrap();
        assert!(build_matching(&a, 0).unwrap().couples.is_empty());
    }

    #[test]
    fn one_couple() {
        // {000, 011} has chi +2, {001, 111} has chi -2.
        let a = PairSet::from_bits(3, &[(0, 3), (1, 7)]).unwrap();
        let m = build_matching(&a, 1).unwrap();
        assert_eq!(m.couples, vec![(0, 1)]);
        m.validate(&a, 1).unwrap();
    }

    #[test]
    fn unbalanced_is_rejected() {
        let a = PairSet::from_bits(3, &[(0, 3)]).unwrap();
        assert_eq!(build_matching(&a, 0), Err(PairSetError::Unbalanced(2)));
    }

    fn all_matchings(a: &PairSet, i: usize) -> Vec<Matching> {
        // Brute force: every bijection from plus-pairs to minus-pairs.
        let plus: Vec<usize> = (0..a.len()).filter(|&x| a.pairs[x].chi() == 2).collect();
        let minus: Vec<usize> = (0..a.len()).filter(|&x| a.pairs[x].chi() == -2).collect();
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..minus.len()).collect();
        permute(&mut perm, 0, &mut |p| {
            let mut couples: Vec<_> =
                plus.iter().zip(p).map(|(&x, &y)| (x.min(minus[y]), x.max(minus[y]))).collect();
            couples.sort_unstable();
            let m = Matching { couples };
            if m.validate(a, i).is_ok() {
                out.push(m);
            }
        });
        out
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for j in k..v.len() {
            v.swap(k, j);
            permute(v, k + 1, f);
            v.swap(k, j);
        }
    }

    #[test]
    fn four_degenerate_pairs_match_within_sides() {
        // Two positive (bits 0, 3) and two negative (bits 1, 7) degenerate
        // pairs plus one edge pair, checked against every bijection.
        let mut raw: Vec<(u32, u32)> = [0u32, 3, 1, 7].iter().map(|&x| (x, x)).collect();
        raw.push((4, 6));
        let a = PairSet::from_bits(3, &raw).unwrap();
        for i in 0..3 {
            let brute = all_matchings(&a, i);
            match build_matching(&a, i) {
                Ok(m) => {
                    m.validate(&a, i).unwrap();
                    assert!(brute.contains(&m));
                    assert_eq!(m.couples.len(), (a.len() - a.odd_count()) / 2);
                }
                Err(PairSetError::ConstraintInfeasibleAtI(j)) => {
                    assert_eq!(j, i);
                    assert!(brute.is_empty(), "brute force found a matching at {i}");
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn randomized_matchings_are_valid_and_agree_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let a = crate::sample::random_balanced(4, 6, &mut rng);
            for i in 0..4 {
                let brute = all_matchings(&a, i);
                match build_matching_with(&a, i, &mut rng) {
                    Ok(m) => {
                        m.validate(&a, i).unwrap();
                        assert!(brute.contains(&m));
                    }
                    Err(PairSetError::ConstraintInfeasibleAtI(_)) => assert!(brute.is_empty()),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}
