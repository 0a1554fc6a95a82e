//! Generate-and-canonicalize enumeration of pair-set classes.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{search_connector, BaseError, Exhaustion, SearchOutcome};
use crate::connector::Connector;
use crate::io::SCHEMA_VERSION;
use crate::pairset::canonical::canonical_raw;
use crate::pairset::PairSet;
use crate::sample;

const MAX_FULL_CENSUS_DIM: u8 = 4;
const MAX_SAMPLED_CENSUS_DIM: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityClass {
    /// Every pair odd.
    Odd,
    /// `χ(A) = 0`; even and degenerate pairs allowed.
    Balanced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeCount {
    Any,
    Exactly(usize),
    AtLeast(usize),
}

impl EdgeCount {
    fn admits(self, k: usize) -> bool {
        match self {
            EdgeCount::Any => true,
            EdgeCount::Exactly(m) => k == m,
            EdgeCount::AtLeast(m) => k >= m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CensusFilter {
    pub parity: ParityClass,
    pub min_size: usize,
    pub max_size: usize,
    pub edge_pairs: EdgeCount,
    pub enc_empty: bool,
    pub diminishable: bool,
}

impl CensusFilter {
    pub fn odd(min_size: usize, max_size: usize) -> CensusFilter {
        CensusFilter {
            parity: ParityClass::Odd,
            min_size,
            max_size,
            edge_pairs: EdgeCount::Any,
            enc_empty: false,
            diminishable: false,
        }
    }

    pub fn balanced(min_size: usize, max_size: usize) -> CensusFilter {
        CensusFilter { parity: ParityClass::Balanced, ..CensusFilter::odd(min_size, max_size) }
    }

    pub fn accepts(&self, a: &PairSet) -> bool {
        let parity_ok = match self.parity {
            ParityClass::Odd => a.is_odd(),
            ParityClass::Balanced => a.is_balanced(),
        };
        !a.is_empty()
            && parity_ok
            && (self.min_size..=self.max_size).contains(&a.len())
            && self.edge_pairs.admits(a.edge_pair_count())
            && (!self.enc_empty || a.enc().is_empty())
            && (!self.diminishable || a.diminishable())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CensusScope {
    /// Every labeled pair-set passing the filter.
    Exhaustive,
    /// `samples` random draws passing the filter.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClassVerdict {
    Connectable { connector: Connector },
    NonConnectable { exhaustion: Exhaustion },
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRecord {
    pub schema_version: u32,
    pub class: PairSet,
    /// Size of the isomorphism class among all labeled pair-sets of `Q_n`.
    pub orbit_size: u64,
    /// Labeled pair-sets of this class that were generated.
    pub raw_count: u64,
    #[serde(flatten)]
    pub verdict: ClassVerdict,
}

impl ClassRecord {
    pub fn connectable(&self) -> bool {
        matches!(self.verdict, ClassVerdict::Connectable { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CensusSummary {
    pub classes: usize,
    pub raw: u64,
    pub non_connectable_classes: usize,
    pub non_connectable_raw: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub n: u8,
    pub filter: CensusFilter,
    pub scope: CensusScope,
    pub records: Vec<ClassRecord>,
}

impl Census {
    pub fn summary(&self) -> CensusSummary {
        let bad = self.records.iter().filter(|r| !r.connectable());
        CensusSummary {
            classes: self.records.len(),
            raw: self.records.iter().map(|r| r.raw_count).sum(),
            non_connectable_classes: bad.clone().count(),
            non_connectable_raw: bad.map(|r| r.raw_count).sum(),
        }
    }

    pub fn non_connectable(&self) -> impl Iterator<Item = &ClassRecord> {
        self.records.iter().filter(|r| !r.connectable())
    }

    /// One JSON object per class, in canonical order.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            writeln!(w)?;
        }
        Ok(())
    }
}

fn labeled(dim: u8, filter: &CensusFilter) -> Vec<PairSet> {
    fn rec(dim: u8, f: &CensusFilter, used: u64, start: u32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<PairSet>) {
        if cur.len() >= f.min_size {
            if let Ok(a) = PairSet::try_from_raw(dim, cur.iter().copied()) {
                if f.accepts(&a) {
                    out.push(a);
                }
            }
        }
        if cur.len() == f.max_size {
            return;
        }
        let size = 1u32 << dim;
        for x in start..size {
            if used >> x & 1 == 1 {
                continue;
            }
            for y in x..size {
                if y != x && used >> y & 1 == 1 {
                    continue;
                }
                if f.parity == ParityClass::Odd && (x ^ y).count_ones() % 2 == 0 {
                    continue;
                }
                cur.push((x, y));
                rec(dim, f, used | 1 << x | 1 << y, x + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(dim, filter, 0, 0, &mut Vec::new(), &mut out);
    out
}

fn sampled(dim: u8, filter: &CensusFilter, samples: usize, seed: u64) -> Vec<PairSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = (1usize << (dim - 1)).min(filter.max_size);
    let mut out = Vec::with_capacity(samples);
    let mut tries = 0usize;
    while out.len() < samples && tries < samples.saturating_mul(1000) {
        tries += 1;
        let a = if filter.diminishable {
            sample::random_diminishable(dim, &mut rng)
        } else {
            match filter.parity {
                ParityClass::Odd => {
                    let k = rng.gen_range(filter.min_size.max(1)..=cap.max(filter.min_size.max(1)));
                    sample::random_odd(dim, k, &mut rng)
                }
                ParityClass::Balanced => sample::random_balanced(dim, cap.max(1), &mut rng),
            }
        };
        if filter.accepts(&a) {
            out.push(a);
        }
    }
    out
}

/// Census of isomorphism classes of pair-sets in `Q_n` passing `filter`,
/// each decided by exhaustive search. Exhaustive scope needs `n <= 4`;
/// sampled scope allows `n = 5`.
pub fn enumerate_classes(n: u8, filter: CensusFilter, scope: CensusScope) -> Result<Census, BaseError> {
    let max = match scope {
        CensusScope::Exhaustive => MAX_FULL_CENSUS_DIM,
        CensusScope::Sampled { .. } => MAX_SAMPLED_CENSUS_DIM,
    };
    if n > max || n == 0 {
        return Err(BaseError::DimensionTooLarge { dim: n, max });
    }
    let sets = match scope {
        CensusScope::Exhaustive => labeled(n, &filter),
        CensusScope::Sampled { samples, seed } => sampled(n, &filter, samples, seed),
    };
    let canon: Vec<(Vec<(u32, u32)>, u64)> = sets.par_iter().map(|a| canonical_raw(n, &a.raw())).collect();
    let mut classes: BTreeMap<Vec<(u32, u32)>, (u64, u64)> = BTreeMap::new();
    for (form, stab) in canon {
        classes.entry(form).or_insert((stab, 0)).1 += 1;
    }
    let group = crate::pairset::automorphism_count(n);
    let records = classes
        .into_par_iter()
        .map(|(form, (stab, raw_count))| {
            let class = PairSet::from_raw_unchecked(n, form);
            let found = search_connector(&class, None).expect("dimension checked").outcome;
            let verdict = match found {
                SearchOutcome::Connected(connector) => ClassVerdict::Connectable { connector },
                SearchOutcome::NonConnectable(exhaustion) => ClassVerdict::NonConnectable { exhaustion },
                SearchOutcome::BudgetExceeded { .. } => unreachable!("unbudgeted search"),
            };
            ClassRecord { schema_version: SCHEMA_VERSION, class, orbit_size: group / stab, raw_count, verdict }
        })
        .collect();
    Ok(Census { n, filter, scope, records })
}
