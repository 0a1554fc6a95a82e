use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::sample;
use crate::verify::check;

fn solve(a: &PairSet) -> SearchOutcome {
    search_connector(a, None).unwrap().outcome
}

fn connected(a: &PairSet) -> Connector {
    match solve(a) {
        SearchOutcome::Connected(c) => {
            check(a, &c).unwrap();
            c
        }
        other => panic!("{a:?}: {other:?}"),
    }
}

#[test]
fn forced_small_cases() {
    let a = PairSet::parse(&[("0", "1")]).unwrap();
    assert_eq!(connected(&a).raw_paths(), &[vec![0, 1]]);
    let a = PairSet::parse(&[("00", "01")]).unwrap();
    let strings: Vec<String> = connected(&a).path(0).iter().map(|v| v.to_string()).collect();
    assert_eq!(strings, ["00", "10", "11", "01"]);
}

#[test]
fn obviously_impossible_sets() {
    // Even pair alone, and the two halves of an edge cut off from the rest.
    for a in [PairSet::parse(&[("00", "11")]).unwrap(), PairSet::parse(&[("000", "110"), ("100", "010")]).unwrap()] {
        assert!(matches!(solve(&a), SearchOutcome::NonConnectable(_)), "{a:?}");
        assert!(naive_connector(&a).unwrap().is_none());
    }
}

#[test]
fn budget_and_dimension_limits() {
    let a = PairSet::parse(&[("0000", "1000")]).unwrap();
    assert!(matches!(search_connector(&a, Some(0)).unwrap().outcome, SearchOutcome::BudgetExceeded { nodes: 1 }));
    let big = PairSet::parse(&[("0000000", "1000000")]).unwrap();
    assert_eq!(search_connector(&big, None).unwrap_err(), BaseError::DimensionTooLarge { dim: 7, max: 6 });
    assert!(naive_connector(&PairSet::parse(&[("00000", "10000")]).unwrap()).is_err());
}

#[test]
fn exhaustion_token_is_stable() {
    let a = PairSet::parse(&[("000", "110"), ("100", "010")]).unwrap();
    assert_eq!(solve(&a), solve(&a));
}

#[test]
fn q3_balanced_pairs_census() {
    let c = enumerate_classes(3, CensusFilter::balanced(2, 2), CensusScope::Exhaustive).unwrap();
    assert_eq!(c.summary().non_connectable_classes, 2);
    for r in &c.records {
        assert_eq!(r.raw_count, r.orbit_size);
    }
}

#[test]
fn q4_small_odd_census_has_one_exception() {
    let c = enumerate_classes(4, CensusFilter::odd(1, 3), CensusScope::Exhaustive).unwrap();
    let bad: Vec<_> = c.non_connectable().collect();
    assert_eq!(bad.len(), 1);
    assert_eq!(bad[0].class.len(), 3);
    assert!(!bad[0].class.diminishable());
}

#[test]
fn census_verdicts_agree_with_naive_search() {
    for (n, f) in [(2, CensusFilter::balanced(1, 2)), (3, CensusFilter::balanced(1, 3)), (4, CensusFilter::odd(1, 3))] {
        let c = enumerate_classes(n, f, CensusScope::Exhaustive).unwrap();
        for r in &c.records {
            let naive = naive_connector(&r.class).unwrap();
            if let Some(conn) = &naive {
                check(&r.class, conn).unwrap();
            }
            assert_eq!(naive.is_some(), r.connectable(), "{:?}", r.class);
            if let ClassVerdict::Connectable { connector } = &r.verdict {
                check(&r.class, connector).unwrap();
            }
        }
    }
}

#[test]
fn diminishable_sets_in_q3_are_connectable() {
    let c = enumerate_classes(3, CensusFilter::odd(1, 4), CensusScope::Exhaustive).unwrap();
    for r in &c.records {
        if r.class.diminishable() {
            assert!(r.connectable(), "{:?}", r.class);
        }
    }
}

#[test]
fn census_output_is_reproducible() {
    let run = || {
        let c = enumerate_classes(3, CensusFilter::odd(1, 2), CensusScope::Exhaustive).unwrap();
        let mut buf = Vec::new();
        c.write_jsonl(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    };
    let text = run();
    assert_eq!(text, run());
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["schema_version"], 1);
    assert!(first["verdict"].is_string());
    assert!(first["class"]["pairs"].is_array());
}

#[test]
fn sampled_census_in_q5() {
    let mut f = CensusFilter::odd(1, 5);
    f.diminishable = true;
    let c = enumerate_classes(5, f, CensusScope::Sampled { samples: 40, seed: 3 }).unwrap();
    assert_eq!(c.summary().raw, 40);
    assert_eq!(c.summary().non_connectable_classes, 0);
    assert!(enumerate_classes(5, f, CensusScope::Exhaustive).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pruned_and_naive_search_agree(seed in any::<u64>(), n in 2u8..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::random_balanced(n, 4, &mut rng);
        let naive = naive_connector(&a).unwrap();
        match solve(&a) {
            SearchOutcome::Connected(c) => {
                prop_assert_eq!(check(&a, &c), Ok(()));
                prop_assert!(naive.is_some());
            }
            SearchOutcome::NonConnectable(_) => prop_assert!(naive.is_none()),
            SearchOutcome::BudgetExceeded { .. } => prop_assert!(false),
        }
    }

    #[test]
    fn diminishable_q5_sets_are_connected(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::random_diminishable(5, &mut rng);
        match solve(&a) {
            SearchOutcome::Connected(c) => prop_assert_eq!(check(&a, &c), Ok(())),
            other => prop_assert!(false, "{:?}: {:?}", a, other),
        }
    }
}
