//! Random pair-set generators used by tests, benchmarks and the CLI.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::pairset::PairSet;

fn vertices_of_parity<R: Rng>(dim: u8, even: bool, count: usize, rng: &mut R) -> Vec<u32> {
    let half = 1usize << (dim - 1);
    assert!(count <= half, "not enough vertices of one parity");
    sample(rng, half, count)
        .into_iter()
        .map(|x| {
            // x indexes the vertices of the requested parity via their top dim-1 bits.
            let hi = (x as u32) << 1;
            let low = (hi.count_ones() % 2 == 1) as u32;
            let v = hi | low;
            if even {
                v
            } else {
                v ^ 1
            }
        })
        .collect()
}

/// A uniformly random odd pair-set with exactly `size` pairs.
pub fn random_odd<R: Rng>(dim: u8, size: usize, rng: &mut R) -> PairSet {
    let evens = vertices_of_parity(dim, true, size, rng);
    let mut odds = vertices_of_parity(dim, false, size, rng);
    odds.shuffle(rng);
    PairSet::from_raw_unchecked(dim, evens.into_iter().zip(odds))
}

/// A random balanced pair-set with between 1 and `max_size` pairs, mixing odd
/// pairs with couples of even pairs of opposite sign, some degenerate.
pub fn random_balanced<R: Rng>(dim: u8, max_size: usize, rng: &mut R) -> PairSet {
    let cap = 1usize << dim;
    loop {
        let size = rng.gen_range(1..=max_size.min(cap / 2).max(1));
        let couples = rng.gen_range(0..=size / 2);
        let odd = size - 2 * couples;
        // Per couple: a +2 pair and a -2 pair. Each is degenerate with
        // probability 1/3 and otherwise uses two vertices of its parity.
        let mut shape = Vec::new();
        let (mut need_even, mut need_odd) = (odd, odd);
        for _ in 0..couples {
            let dp = rng.gen_bool(1.0 / 3.0);
            let dm = rng.gen_bool(1.0 / 3.0);
            need_even += if dp { 1 } else { 2 };
            need_odd += if dm { 1 } else { 2 };
            shape.push((dp, dm));
        }
        if need_even > cap / 2 || need_odd > cap / 2 {
            continue;
        }
        let mut ev = vertices_of_parity(dim, true, need_even, rng).into_iter();
        let mut ov = vertices_of_parity(dim, false, need_odd, rng).into_iter();
        let mut raw = Vec::with_capacity(size);
        for _ in 0..odd {
            raw.push((ev.next().unwrap(), ov.next().unwrap()));
        }
        for (dp, dm) in shape {
            let x = ev.next().unwrap();
            raw.push((x, if dp { x } else { ev.next().unwrap() }));
            let y = ov.next().unwrap();
            raw.push((y, if dm { y } else { ov.next().unwrap() }));
        }
        if raw.iter().all(|(x, y)| x == y) {
            continue;
        }
        return PairSet::from_raw_unchecked(dim, raw);
    }
}

/// Number of odd pair-sets of each size `0..=max` in `Q_dim`, as floats.
fn odd_set_counts(dim: u8, max: usize) -> Vec<f64> {
    let h = (1u64 << (dim - 1)) as f64;
    let mut out = vec![1.0];
    for k in 1..=max {
        // C(h, k)^2 k! built incrementally: multiply by (h-k+1)^2 / k.
        let prev = out[k - 1];
        out.push(prev * (h - k as f64 + 1.0).powi(2) / k as f64);
    }
    out
}

/// A uniformly random diminishable pair-set in `Q_dim` (by rejection from the
/// uniform distribution on nonempty odd pair-sets of size at most `dim`).
pub fn random_diminishable<R: Rng>(dim: u8, rng: &mut R) -> PairSet {
    let max = (dim as usize).min(1 << (dim - 1));
    let counts = odd_set_counts(dim, max);
    let total: f64 = counts[1..].iter().sum();
    loop {
        let mut x = rng.gen::<f64>() * total;
        let mut size = max;
        for (k, &c) in counts.iter().enumerate().skip(1) {
            if x < c {
                size = k;
                break;
            }
            x -= c;
        }
        let a = random_odd(dim, size, rng);
        if a.diminishable() {
            return a;
        }
    }
}

/// The classical obstruction: pairs `{e_i, β_i}` for every coordinate, with
/// `β_i` random nonzero even-weight vertices, so that `ε` is encompassed.
pub fn unit_vector_family<R: Rng>(dim: u8, rng: &mut R) -> PairSet {
    let betas: Vec<u32> = loop {
        let cand = vertices_of_parity(dim, true, dim as usize + 1, rng);
        let filtered: Vec<u32> = cand.into_iter().filter(|&b| b != 0).take(dim as usize).collect();
        if filtered.len() == dim as usize {
            break filtered;
        }
    };
    PairSet::from_raw_unchecked(dim, (0..dim as usize).map(|i| (1u32 << i, betas[i])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let d = rng.gen_range(2..=8u8);
            let k = rng.gen_range(1..=d as usize);
            let a = random_odd(d, k, &mut rng);
            assert!(a.is_odd() && a.len() == k);
            let b = random_balanced(d, 2 * d as usize, &mut rng);
            assert!(b.is_balanced() && !b.is_empty());
            let c = unit_vector_family(d.max(3), &mut rng);
            assert!(c.is_odd());
            assert!(c.enc().contains(&crate::Vertex::zero(d.max(3) as u32).unwrap()));
        }
        for _ in 0..50 {
            assert!(random_diminishable(5, &mut rng).diminishable());
        }
    }

    #[test]
    fn parity_sampler_covers_the_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut all = vertices_of_parity(4, false, 8, &mut rng);
        all.sort_unstable();
        assert_eq!(all, (0..16u32).filter(|x| x.count_ones() % 2 == 1).collect::<Vec<_>>());
    }
}
