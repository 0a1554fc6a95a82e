use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::surgery::{run, Plan};
use super::*;
use crate::basesolver::{naive_connector, search_connector};
use crate::completion::complete_random;
use crate::pairset::automorphisms;
use crate::sample;
use crate::verify::check;

fn connected(a: &PairSet, cfg: &SolveConfig) -> Connector {
    let r = solve(a, cfg).unwrap();
    match r.verdict {
        Verdict::Connected { connector } => {
            check(a, &connector).unwrap();
            connector
        }
        other => panic!("{a:?}: {other:?}"),
    }
}

fn searched(a: &PairSet) -> Option<Connector> {
    match search_connector(a, None).ok()?.outcome {
        SearchOutcome::Connected(c) => Some(c),
        _ => None,
    }
}

#[test]
fn stitching_a_completion() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut stitched = 0;
    for k in 0..40 {
        let a = sample::random_diminishable(5, &mut rng);
        let Ok(t) = complete_random(&a, k % 5, &CompletionOptions { seed: k as u64, ..Default::default() }) else { continue };
        let c0 = t.half(0).and_then(|h| searched(&h));
        let c1 = t.half(1).and_then(|h| searched(&h));
        if t.half(0).is_some() != c0.is_some() || t.half(1).is_some() != c1.is_some() {
            continue;
        }
        let c = stitch(&t, c0.as_ref(), c1.as_ref()).unwrap();
        check(&a, &c).unwrap();
        stitched += 1;
        if let Some(c0) = &c0 {
            assert_eq!(stitch(&t, c1.as_ref(), Some(c0)).unwrap_err(), StitchError::WrongSubproblem { side: 0 });
        }
    }
    assert!(stitched > 20);
}

#[test]
fn stitching_without_merges_is_a_disjoint_union() {
    // Both pairs already aligned: nothing to merge.
    let a = PairSet::parse(&[("0000", "1000"), ("0001", "1001")]).unwrap();
    let t = complete_random(&a, 3, &CompletionOptions::default()).unwrap();
    assert!(t.merge_script.is_empty());
    let c0 = searched(&t.half(0).unwrap()).unwrap();
    let c1 = searched(&t.half(1).unwrap()).unwrap();
    check(&a, &stitch(&t, Some(&c0), Some(&c1)).unwrap()).unwrap();
}

/// Random odd pair-sets of `Q_6` with `home` pairs inside the half
/// `x_5 = 0`, `splits` pairs across and nothing in the other half.
fn one_sided(home: usize, splits: usize, rng: &mut ChaCha8Rng) -> PairSet {
    loop {
        let a = sample::random_odd(6, home + splits, rng);
        if a.sigma(5) == (home, 0) && a.enc().is_empty() {
            return a;
        }
    }
}

fn try_route(a: &PairSet, plan: Plan) -> Option<SurgeryKind> {
    let mut sub = |x: &PairSet, _seed: u64| searched(x);
    let (c, kind) = run(a, 5, 0, plan, 1, &mut sub)?;
    check(a, &c).unwrap();
    Some(kind)
}

#[test]
fn surgery_routes_on_one_sided_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut seen = HashSet::new();
    for _ in 0..30 {
        let a = one_sided(3, 0, &mut rng);
        let kinds = (0..3).map(|j| try_route(&a, Plan::Lift { lifted: Some(j) })).chain([try_route(&a, Plan::Lift { lifted: None })]);
        for k in kinds.flatten() {
            seen.insert(format!("{k:?}").split(' ').next().unwrap().to_string());
        }
        let b = one_sided(2, 2, &mut rng);
        if let Some(k) = try_route(&b, Plan::Lift { lifted: None }) {
            assert!(matches!(k, SurgeryKind::SplitVertex { splits: 2 }));
            seen.insert("SplitVertex".into());
        }
        let raw = b.raw();
        let splits: Vec<usize> = (0..2 + 2).filter(|&j| (raw[j].0 ^ raw[j].1) >> 5 & 1 == 1).collect();
        if let Some(k) = try_route(&b, Plan::Merge { p0: splits[0], p1: splits[1] }) {
            assert!(matches!(k, SurgeryKind::MergeSplit { .. }));
            seen.insert("MergeSplit".into());
        }
    }
    for route in ["EmptyHalf", "LiftPair", "SplitVertex", "MergeSplit"] {
        assert!(seen.contains(route), "{route} never succeeded: {seen:?}");
    }
}

#[test]
fn cutter_keeps_every_vertex() {
    let a = PairSet::parse(&[("000", "001")]).unwrap();
    let c = searched(&a).unwrap();
    let mut cut = surgery::Cutter::new(&c);
    let x = c.raw_paths()[0][3];
    let (p, q) = cut.cut_vertex(x).unwrap();
    assert!(cut.paths.iter().any(|p| p == &vec![x]));
    assert_eq!(cut.paths.iter().map(Vec::len).sum::<usize>(), 8);
    assert!(cut.paths.iter().any(|s| s.last() == Some(&p)) && cut.paths.iter().any(|s| s.first() == Some(&q)));
    assert!(cut.cut_vertex(0).is_none(), "endpoints are not interior");
}

#[test]
fn gray_paths_up_to_dimension_twelve() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=12u8 {
        for _ in 0..5 {
            let x: u32 = rng.gen_range(0..1 << n);
            let flips: u32 = loop {
                let f = rng.gen_range(0..1u32 << n);
                if f.count_ones() % 2 == 1 {
                    break f;
                }
            };
            let (from, to) = (Vertex::from_raw(x, n), Vertex::from_raw(x ^ flips, n));
            let path = gray_path(from, to, 3).unwrap();
            assert_eq!(path.len(), 1 << n);
            assert_eq!((path[0], path[path.len() - 1]), (from, to));
            assert!(path.windows(2).all(|w| w[0].is_adjacent(w[1])));
        }
    }
    let v = |s: &str| Vertex::parse_bitstring(s).unwrap();
    assert!(matches!(gray_path(v("00"), v("11"), 0), Err(GrayError::EvenDistance(..))));
    assert_eq!(gray_path(v("0"), v("01"), 0), Err(GrayError::DimensionMismatch));
}

#[test]
fn obstructions_are_reported() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 3..=10u8 {
        let a = sample::unit_vector_family(n, &mut rng);
        let r = solve(&a, &SolveConfig::default()).unwrap();
        assert!(
            matches!(&r.verdict, Verdict::NonConnectable { obstruction: Obstruction::EncObstruction { vertices } } if vertices.contains(&Vertex::from_raw(0, n))),
            "{n}: {:?}",
            r.verdict
        );
    }
    let unbalanced = PairSet::parse(&[("000", "011"), ("101", "110")]).unwrap();
    assert!(matches!(
        solve(&unbalanced, &SolveConfig::default()).unwrap().verdict,
        Verdict::NonConnectable { obstruction: Obstruction::Unbalanced { chi: 4 } }
    ));
    let even = PairSet::parse(&[("0000", "0011"), ("0001", "0010")]).unwrap();
    let strict = SolveConfig { require_odd: true, ..Default::default() };
    assert!(matches!(solve(&even, &strict).unwrap().verdict, Verdict::NonConnectable { obstruction: Obstruction::EvenPair { .. } }));
    assert!(solve(&PairSet::empty(3), &SolveConfig::default()).is_err());
}

#[test]
fn c2_is_recognised_in_every_orientation() {
    let form = c2_forms().iter().next().unwrap().clone();
    let c2 = PairSet::from_raw_unchecked(4, form);
    assert!(!c2.diminishable());
    for g in automorphisms(4).step_by(17) {
        let b = g.apply_set(&c2);
        assert!(is_c2(&b));
        let r = solve(&b, &SolveConfig::default()).unwrap();
        assert!(matches!(r.verdict, Verdict::NonConnectable { obstruction: Obstruction::C2 }));
    }
    assert_eq!(c2_forms().len(), 1);
}

#[test]
fn verdicts_agree_with_naive_search_in_q4() {
    let census = basesolver::enumerate_classes(4, CensusFilter::odd(1, 3), CensusScope::Exhaustive).unwrap();
    let cfg = SolveConfig::default();
    for r in &census.records {
        let naive = naive_connector(&r.class).unwrap().is_some();
        let ours = solve(&r.class, &cfg).unwrap();
        assert_eq!(ours.connector().is_some(), naive, "{:?}", r.class);
        assert!(!matches!(ours.verdict, Verdict::Unresolved));
    }
}

#[test]
fn reports_are_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = sample::random_odd(8, 7, &mut rng);
    let cfg = SolveConfig { seed: 99, ..Default::default() };
    let (r1, r2) = (solve(&a, &cfg).unwrap(), solve(&a, &SolveConfig { parallel: false, ..cfg }).unwrap());
    assert_eq!(r1.verdict, r2.verdict);
    assert_eq!(r1.trail, r2.trail);
    let json = serde_json::to_value(&r1).unwrap();
    assert_eq!(json["verdict"], "connected");
    assert!(json["trail"].as_array().unwrap().iter().any(|t| t["strategy"]["kind"] == "completion"));
}

#[test]
fn sets_beyond_dimension_six_are_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 7..=9u8 {
        let a = sample::random_odd(n, n as usize - 1, &mut rng);
        let r = solve(&a, &SolveConfig::default()).unwrap();
        connected(&a, &SolveConfig::default());
        assert!(r.trail.iter().all(|t| t.dim <= 5 || !matches!(t.strategy, Strategy::Search)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn small_odd_sets_are_connected(seed in any::<u64>(), n in 5u8..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = rng.gen_range(1..n as usize);
        let a = sample::random_odd(n, m, &mut rng);
        let cfg = SolveConfig { seed, ..Default::default() };
        match solve(&a, &cfg).unwrap().verdict {
            Verdict::Connected { connector } => prop_assert_eq!(check(&a, &connector), Ok(())),
            Verdict::NonConnectable { obstruction } => prop_assert!(!a.enc().is_empty(), "{:?}", obstruction),
            Verdict::Unresolved => prop_assert!(false, "unresolved {:?}", a),
        }
    }

    #[test]
    fn balanced_verdicts_are_sound(seed in any::<u64>(), n in 2u8..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::random_balanced(n, n as usize, &mut rng);
        let r = solve(&a, &SolveConfig { seed, ..Default::default() }).unwrap();
        if let Some(c) = r.connector() {
            prop_assert_eq!(check(&a, c), Ok(()));
        }
        if n <= 4 {
            prop_assert_eq!(r.connector().is_some(), naive_connector(&a).unwrap().is_some());
        }
    }
}

#[test]
fn obstruction_json_is_flat() {
    let v = serde_json::to_value(Verdict::NonConnectable { obstruction: Obstruction::C2 }).unwrap();
    assert_eq!(v, serde_json::json!({"verdict": "non_connectable", "reason": "C2"}));
    let v = serde_json::to_value(Verdict::NonConnectable { obstruction: Obstruction::Unbalanced { chi: 2 } }).unwrap();
    assert_eq!(v, serde_json::json!({"verdict": "non_connectable", "reason": "unbalanced", "chi": 2}));
}
