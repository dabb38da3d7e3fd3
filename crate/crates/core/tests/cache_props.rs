use proptest::prelude::*;

use roofsim_core::cache::{
    build_hierarchy, AccessKind, CacheConfig, CacheHierarchy, Inclusion, Level, Outcome, PolicyKind,
};

const LINE: u64 = 64;

fn single(sets: u64, ways: u32, policy: PolicyKind) -> CacheHierarchy {
    build_hierarchy(&[CacheConfig::new(Level::L1, sets * u64::from(ways) * LINE, ways, policy)]).unwrap()
}

fn l1_hits(h: &mut CacheHierarchy, lines: &[u64]) -> Vec<bool> {
    lines
        .iter()
        .map(|&l| matches!(h.access(l * LINE, AccessKind::Load), Outcome::Hit(0)))
        .collect()
}

/// Per-set recency stacks, most recent first.
fn stack_lru(lines: &[u64], sets: u64, ways: usize) -> Vec<bool> {
    let mut stacks = vec![Vec::<u64>::new(); sets as usize];
    lines
        .iter()
        .map(|&l| {
            let s = &mut stacks[(l % sets) as usize];
            let pos = s.iter().position(|&x| x == l);
            if let Some(p) = pos {
                s.remove(p);
            }
            s.insert(0, l);
            s.truncate(ways);
            pos.is_some()
        })
        .collect()
}

fn three_level(inclusion: Inclusion, policy: PolicyKind) -> Vec<CacheConfig> {
    let mut l3 = CacheConfig::new(Level::L3, 16 * 11 * LINE, 11, policy);
    l3.inclusion = inclusion;
    vec![
        CacheConfig::new(Level::L1, 2 * 4 * LINE, 4, PolicyKind::TreePlru),
        CacheConfig::new(Level::L2, 4 * 8 * LINE, 8, PolicyKind::TreePlru),
        l3,
    ]
}

fn kind_of(b: u8) -> AccessKind {
    match b % 8 {
        0..=4 => AccessKind::Load,
        5 | 6 => AccessKind::Store,
        _ => AccessKind::StoreNt,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn true_lru_matches_stack_model(
        lines in prop::collection::vec(0u64..256, 1..2000),
        sets in prop::sample::select(vec![1u64, 2, 4, 16]),
        ways in 1u32..=16,
    ) {
        let mut h = single(sets, ways, PolicyKind::TrueLru);
        prop_assert_eq!(l1_hits(&mut h, &lines), stack_lru(&lines, sets, ways as usize));
    }

    #[test]
    fn true_lru_hits_never_drop_with_more_ways(
        lines in prop::collection::vec(0u64..200, 1..1500),
        sets in prop::sample::select(vec![1u64, 4, 8]),
        ways in 1u32..16,
    ) {
        let small = l1_hits(&mut single(sets, ways, PolicyKind::TrueLru), &lines);
        let large = l1_hits(&mut single(sets, ways + 1, PolicyKind::TrueLru), &lines);
        for (s, l) in small.iter().zip(&large) {
            prop_assert!(!s || *l);
        }
    }

    #[test]
    fn plru_equals_lru_when_every_set_fits(
        picks in prop::collection::vec(0usize..64, 1..1500),
        ways in prop::sample::select(vec![2u32, 4, 8, 11, 16]),
    ) {
        let sets = 4u64;
        // at most `ways` distinct lines per set
        let universe: Vec<u64> = (0..sets * u64::from(ways)).collect();
        let lines: Vec<u64> = picks.iter().map(|&p| universe[p % universe.len()]).collect();
        let lru = l1_hits(&mut single(sets, ways, PolicyKind::TrueLru), &lines);
        let plru = l1_hits(&mut single(sets, ways, PolicyKind::TreePlru), &lines);
        prop_assert_eq!(lru, plru);
    }

    #[test]
    fn inclusive_hierarchy_keeps_inner_lines_in_last_level(
        accesses in prop::collection::vec((0u64..400, any::<u8>()), 1..1500),
        policy in prop::sample::select(PolicyKind::ALL.to_vec()),
    ) {
        let mut h = build_hierarchy(&three_level(Inclusion::Inclusive, policy)).unwrap();
        for (line, k) in accesses {
            h.access(line * LINE, kind_of(k));
            let levels = h.levels();
            for inner in &levels[..2] {
                for l in inner.resident_lines() {
                    prop_assert!(levels[2].contains(l), "line {} missing from L3", l);
                }
            }
        }
    }

    #[test]
    fn victim_last_level_never_duplicates_l2(
        accesses in prop::collection::vec((0u64..400, any::<u8>()), 1..1500),
        policy in prop::sample::select(PolicyKind::ALL.to_vec()),
    ) {
        let mut h = build_hierarchy(&three_level(Inclusion::VictimNoninclusive, policy)).unwrap();
        for (line, k) in accesses {
            h.access(line * LINE, kind_of(k));
            let levels = h.levels();
            for l in levels[1].resident_lines() {
                prop_assert!(!levels[2].contains(l), "line {} in both L2 and L3", l);
            }
        }
    }

    #[test]
    fn reports_are_deterministic(
        accesses in prop::collection::vec((0u64..1000, any::<u8>()), 1..1000),
        inclusion in prop::sample::select(vec![Inclusion::Inclusive, Inclusion::VictimNoninclusive]),
        policy in prop::sample::select(PolicyKind::ALL.to_vec()),
    ) {
        let trace: Vec<_> = accesses
            .iter()
            .map(|&(l, k)| roofsim_core::Access { addr: l * LINE + 8, kind: kind_of(k) })
            .collect();
        let cfg = three_level(inclusion, policy);
        let a = build_hierarchy(&cfg).unwrap().run_trace(&trace, Some(7));
        let b = build_hierarchy(&cfg).unwrap().run_trace(&trace, Some(7));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn load_only_traffic_is_last_level_misses(
        lines in prop::collection::vec(0u64..2000, 1..2000),
        inclusion in prop::sample::select(vec![Inclusion::Inclusive, Inclusion::VictimNoninclusive]),
        policy in prop::sample::select(PolicyKind::ALL.to_vec()),
    ) {
        let trace: Vec<_> = lines
            .iter()
            .map(|&l| roofsim_core::Access { addr: l * LINE, kind: AccessKind::Load })
            .collect();
        let rep = build_hierarchy(&three_level(inclusion, policy)).unwrap().run_trace(&trace, None);
        let last = rep.last_level().unwrap();
        prop_assert_eq!(rep.bytes_read_mem, last.misses * LINE);
        prop_assert_eq!(rep.bytes_written_mem, 0);
        // each level only sees the lookups that missed every level before it
        for (lvl, prev) in rep.levels.iter().skip(1).zip(&rep.levels) {
            prop_assert_eq!(lvl.hits + lvl.misses, prev.misses);
        }
    }
}

#[test]
fn lru_thrashes_on_cyclic_ways_plus_one() {
    for ways in [2u32, 4, 8, 11, 16] {
        let lines: Vec<u64> = (0..20).flat_map(|_| 0..u64::from(ways) + 1).collect();
        let hits = l1_hits(&mut single(1, ways, PolicyKind::TrueLru), &lines);
        assert!(hits.iter().all(|h| !h), "{ways} ways");
    }
}

#[test]
fn cold_load_then_reload() {
    let mut h = build_hierarchy(&three_level(Inclusion::Inclusive, PolicyKind::TreePlru)).unwrap();
    assert_eq!(h.access(4096, AccessKind::Load), Outcome::Memory);
    assert_eq!(h.bytes_read_mem(), 64);
    assert_eq!(h.access(4100, AccessKind::Load), Outcome::Hit(0));
    assert_eq!(h.bytes_read_mem(), 64);
}

#[test]
fn victim_hit_promotes_and_invalidates() {
    // single-set L1 (1 way) and L2 (2 ways), so the third access
    // pushes line 0 out of L2 into the victim level
    let mut l3 = CacheConfig::new(Level::L3, 4 * LINE, 4, PolicyKind::TreePlru);
    l3.inclusion = Inclusion::VictimNoninclusive;
    let cfg = vec![
        CacheConfig::new(Level::L1, LINE, 1, PolicyKind::TrueLru),
        CacheConfig::new(Level::L2, 2 * LINE, 2, PolicyKind::TrueLru),
        l3,
    ];
    let mut h = build_hierarchy(&cfg).unwrap();
    h.access(0, AccessKind::Load);
    h.access(LINE, AccessKind::Load);
    h.access(2 * LINE, AccessKind::Load);
    assert!(h.levels()[2].contains(0));
    assert!(!h.levels()[1].contains(0));
    assert_eq!(h.access(0, AccessKind::Load), Outcome::Hit(2));
    assert!(!h.levels()[2].contains(0));
    assert!(h.levels()[0].contains(0) && h.levels()[1].contains(0));
    assert_eq!(h.bytes_read_mem(), 3 * LINE);
}

#[test]
fn in_cache_repeat_costs_nothing() {
    let mut h = build_hierarchy(&three_level(Inclusion::VictimNoninclusive, PolicyKind::AdaptiveDueling)).unwrap();
    let trace: Vec<_> = (0..4)
        .map(|i| roofsim_core::Access {
            addr: i * 8,
            kind: AccessKind::Load,
        })
        .collect();
    h.run_trace(&trace, None);
    let rep = h.run_trace(&trace, Some(4));
    assert_eq!(rep.mem_bytes(), 0);
}

#[test]
fn stream_one_way_restream_keeps_protected_ways() {
    // stream twice the capacity once, then again: exactly the first
    // ways-1 lines of every set survive in the protected ways
    for (sets, ways) in [(16u64, 11u32), (64, 4), (8, 16)] {
        let mut h = single(sets, ways, PolicyKind::StreamOneWay);
        let lines: Vec<u64> = (0..2 * sets * u64::from(ways)).collect();
        l1_hits(&mut h, &lines);
        let hits = l1_hits(&mut h, &lines).iter().filter(|&&x| x).count() as u64;
        assert_eq!(hits, (u64::from(ways) - 1) * sets, "{sets} sets x {ways} ways");
    }
}

#[test]
fn nt_stores_bypass_and_invalidate() {
    let mut h = build_hierarchy(&three_level(Inclusion::Inclusive, PolicyKind::TreePlru)).unwrap();
    h.access(0, AccessKind::Load);
    assert_eq!(h.access(8, AccessKind::StoreNt), Outcome::Bypass);
    assert!(h.levels().iter().all(|l| !l.contains(0)));
    for i in 2..8 {
        h.access(i * 8, AccessKind::StoreNt);
    }
    assert_eq!(h.bytes_written_mem(), LINE);
}

#[test]
fn geometry_errors() {
    assert!(build_hierarchy(&[CacheConfig::new(Level::L1, 1000, 8, PolicyKind::TrueLru)]).is_err());
    let shrinking = vec![
        CacheConfig::new(Level::L1, 64 * 1024, 8, PolicyKind::TrueLru),
        CacheConfig::new(Level::L2, 32 * 1024, 8, PolicyKind::TrueLru),
    ];
    assert!(build_hierarchy(&shrinking).is_err());
    let mut odd = CacheConfig::new(Level::L1, 3 * 8 * LINE, 8, PolicyKind::TreePlru);
    assert!(build_hierarchy(std::slice::from_ref(&odd)).is_err());
    odd = odd.allow_non_pow2();
    assert!(build_hierarchy(&[odd]).is_ok());
}
