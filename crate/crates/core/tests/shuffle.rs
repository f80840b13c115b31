//! Shuffle behavior: case rules, tail counts, exhaustive counting identity,
//! determinism of the seeded sampler.

use std::collections::{HashMap, HashSet};

use dp3_core::enumerate::list_matchings;
use dp3_core::lattice::{kite_containing, Orientation, OrientationPair};
use dp3_core::shuffle::{
    active_kites, active_pair, classify_kite, grow, sample, shuffle, BitSource, DiamondCache, KiteCase, MaskBits,
    SeededBits,
};
use dp3_core::{build_diamond, matching_size, Matching, Order};
use proptest::prelude::*;

fn d(h: u32) -> dp3_core::Diamond {
    build_diamond(Order::from_halves(h)).unwrap()
}

#[test]
fn active_pairs_alternate() {
    assert_eq!(active_pair(Order::integer(1)), OrientationPair::NortheastSouthwest);
    assert_eq!(active_pair(Order::from_halves(1)), OrientationPair::NorthwestSoutheast);
    for k in active_kites(&d(2)) {
        assert!(matches!(k.orientation(), Orientation::NE | Orientation::SW));
    }
    for k in active_kites(&d(1)) {
        assert!(matches!(k.orientation(), Orientation::NW | Orientation::SE));
    }
}

#[test]
fn active_kites_are_sorted_and_cover_every_paired_edge() {
    for h in 1..=8 {
        let dm = d(h);
        let kites = active_kites(&dm);
        let mut sorted = kites.clone();
        sorted.sort();
        assert_eq!(kites, sorted);
        let set: HashSet<_> = kites.iter().collect();
        for e in 0..dm.edges().len() as u32 {
            if let Some(k) = kite_containing(dm.lattice_edge(e), active_pair(dm.order())) {
                assert!(set.contains(&k));
            }
        }
    }
}

#[test]
fn tails_added_per_order() {
    for h in 0..=12u32 {
        let dm = d(h);
        let missing_roots = active_kites(&dm).iter().filter(|k| dm.vertex_id(k.root()).is_none()).count();
        assert_eq!(missing_roots as u32, 2 * (h / 2) + 1, "D_{}", dm.order());
    }
}

#[test]
fn empty_diamond_shuffles_to_both_half_order_matchings() {
    let d0 = d(0);
    let m0 = Matching::empty(&d0);
    assert!(m0.is_perfect(&d0).unwrap());
    let mut outs = HashSet::new();
    for bit in 0..2 {
        let (d1, m1, trace) = shuffle(&d0, &m0, &mut MaskBits::new(bit)).unwrap();
        assert_eq!(d1.order(), Order::from_halves(1));
        assert_eq!(trace.creations(), 1);
        assert_eq!(trace.tails_added, 1);
        outs.insert(m1);
    }
    assert_eq!(outs.len(), 2);
}

#[test]
fn half_order_each_matching_maps_to_two() {
    let dh = d(1);
    let d1 = d(2);
    let all = list_matchings(&d1).unwrap();
    let mut images: HashMap<Matching, usize> = HashMap::new();
    for m in list_matchings(&dh).unwrap() {
        let mut mine = HashSet::new();
        for bit in 0..2 {
            let (_, out, trace) = shuffle(&dh, &m, &mut MaskBits::new(bit)).unwrap();
            assert_eq!(trace.creations(), 1);
            assert_eq!(trace.annihilations(), 0);
            mine.insert(out.clone());
            *images.entry(out).or_default() += 1;
        }
        assert_eq!(mine.len(), 2);
    }
    assert_eq!(images.len(), all.len());
    assert!(images.values().all(|&c| c == 1));
}

#[test]
fn classify_examples_on_creation() {
    // Shuffling the empty matching: the single seed kite is a creation.
    let d0 = d(0);
    let k = active_kites(&d0)[0];
    assert_eq!(classify_kite(&d0, &k, &Matching::empty(&d0)).unwrap(), KiteCase::Creation);
}

#[test]
fn every_case_occurs_by_order_three() {
    let mut seen = HashSet::new();
    let mut cache = DiamondCache::new();
    for seed in 0..20 {
        grow(&mut cache, Order::integer(3), |s| SeededBits::new(seed, s), |t, _, _| {
            seen.extend(t.records.iter().map(|r| r.case));
        })
        .unwrap();
    }
    assert_eq!(seen.len(), 4);
}

#[test]
fn classify_kite_agrees_with_trace() {
    let mut cache = DiamondCache::new();
    let (dm, m) = grow(&mut cache, Order::integer(2), |s| SeededBits::new(3, s), |_, _, _| {}).unwrap();
    let (_, _, trace) = shuffle(&dm, &m, &mut SeededBits::new(3, 4)).unwrap();
    for r in &trace.records {
        assert_eq!(classify_kite(&dm, &r.kite, &m).unwrap(), r.case);
    }
}

/// Every (input matching, creation bits) pair with its output, creation
/// count and annihilation count.
fn all_images(h: u32) -> Vec<(Matching, usize, usize)> {
    let dm = d(h);
    let mut out = Vec::new();
    for m in list_matchings(&dm).unwrap() {
        let mut mask = 0u64;
        loop {
            let (_, img, trace) = shuffle(&dm, &m, &mut MaskBits::new(mask)).unwrap();
            out.push((img, trace.creations(), trace.annihilations()));
            mask += 1;
            if mask >= 1 << trace.creations() {
                break;
            }
        }
    }
    out
}

#[test]
fn counting_identity_exhaustive() {
    for h in 0..=3u32 {
        let n = h / 2;
        let before = list_matchings(&d(h)).unwrap().len();
        let after: HashSet<Matching> = list_matchings(&d(h + 1)).unwrap().into_iter().collect();
        let images = all_images(h);
        let mut preimages: HashMap<Matching, Vec<(usize, usize)>> = HashMap::new();
        for (img, c, a) in images {
            preimages.entry(img).or_default().push((c, a));
        }
        assert_eq!(preimages.keys().cloned().collect::<HashSet<_>>(), after);
        assert_eq!(after.len(), (1 << (n + 1)) * before);
        for pre in preimages.values() {
            // an output reached through a annihilations has exactly 2^a preimages
            for &(c, a) in pre {
                assert_eq!(c, a + n as usize + 1);
                assert_eq!(pre.len(), 1 << a);
            }
        }
    }
}

#[test]
fn locality_edges_off_kites_are_translated() {
    let mut cache = DiamondCache::new();
    let (dm, m) = grow(&mut cache, Order::integer(3), |s| SeededBits::new(11, s), |_, _, _| {}).unwrap();
    let pair = active_pair(dm.order());
    let shift = pair.flip_shift();
    let (next, out, _) = shuffle(&dm, &m, &mut SeededBits::new(11, 6)).unwrap();
    let out_edges: HashSet<_> = out.lattice_edges(&next).into_iter().collect();
    for e in m.lattice_edges(&dm) {
        if kite_containing(e, pair).is_none() {
            assert!(out_edges.contains(&e.translate(shift)));
        }
    }
}

#[test]
fn seeded_bits_random_access_matches_stream() {
    let mut s = SeededBits::new(42, 7);
    for k in 0..200 {
        assert_eq!(s.next_bit(), SeededBits::bit_at(42, 7, k));
    }
    let a: Vec<bool> = (0..64).map(|k| SeededBits::bit_at(1, 0, k)).collect();
    let b: Vec<bool> = (0..64).map(|k| SeededBits::bit_at(1, 1, k)).collect();
    assert_ne!(a, b);
}

#[test]
fn sample_is_deterministic_and_perfect() {
    for h in [0u32, 1, 2, 5, 9] {
        let m = Order::from_halves(h);
        let (d1, a) = sample(m, 99).unwrap();
        let (_, b) = sample(m, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.is_perfect(&d1).unwrap());
        assert_eq!(a.len() as u64, matching_size(m));
    }
    let mut cache = DiamondCache::new();
    let (_, g) = grow(&mut cache, Order::integer(4), |s| SeededBits::new(5, s), |_, _, _| {}).unwrap();
    assert_eq!(g, sample(Order::integer(4), 5).unwrap().1);
}

#[test]
fn shuffle_rejects_imperfect_input() {
    let dm = d(2);
    let m = Matching::from_edge_ids(&dm, [0]).unwrap();
    assert!(shuffle(&dm, &m, &mut MaskBits::new(0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trajectories_obey_step_invariants(seed in any::<u64>(), h in 1u32..=14) {
        let mut cache = DiamondCache::new();
        let mut prev = 0usize;
        let mut failures = Vec::new();
        grow(&mut cache, Order::from_halves(h), |s| SeededBits::new(seed, s), |t, next, m| {
            let n = t.order_before.floor() as usize;
            if t.tails_added != 2 * n + 1 { failures.push(format!("tails {}", t.order_before)); }
            if t.creations() != t.annihilations() + n + 1 { failures.push(format!("creations {}", t.order_before)); }
            if m.len() != prev + 3 * n + 2 { failures.push(format!("growth {}", t.order_before)); }
            if !m.is_perfect(next).unwrap() { failures.push(format!("perfect {}", t.order_before)); }
            prev = m.len();
        }).unwrap();
        prop_assert!(failures.is_empty(), "{:?}", failures);
    }
}
