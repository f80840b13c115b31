//! Height functions, plaquette flips, minimal matchings and meets.

use std::collections::{HashMap, HashSet, VecDeque};

use dp3_core::enumerate::list_matchings;
use dp3_core::height::{circulation_around, height_change, height_function, height_function_with_base};
use dp3_core::lattice::{classify, EdgeKind, VertexKind};
use dp3_core::matching::{apply_flip, flip_direction, flippable_faces, meet, minimal_matching, FlipDirection};
use dp3_core::shuffle::sample;
use dp3_core::{build_diamond, Diamond, HeightFunction, Matching, Order};
use proptest::prelude::*;

fn d(h: u32) -> Diamond {
    build_diamond(Order::from_halves(h)).unwrap()
}

fn heights(dm: &Diamond, ms: &[Matching]) -> Vec<HeightFunction> {
    ms.iter().map(|m| height_function(dm, m).unwrap()).collect()
}

#[test]
fn height_change_by_edge_kind() {
    assert_eq!(height_change(EdgeKind::Long), 1);
    assert_eq!(height_change(EdgeKind::Short), 2);
}

#[test]
fn circulation_around_inner_vertices_is_six() {
    let dm = d(8);
    let mut seen = HashSet::new();
    for &v in dm.vertices() {
        if let Some(total) = circulation_around(&dm, v) {
            let k = classify(v).unwrap();
            // arrows wind counterclockwise around black vertices and clockwise around white ones
            assert_eq!(total, if k.is_black() { 6 } else { -6 }, "{v}");
            seen.insert(k);
        }
    }
    assert_eq!(seen, HashSet::from([VertexKind::Center, VertexKind::Midpoint, VertexKind::Corner]));
}

#[test]
fn heights_exist_for_every_matching_and_ring_is_fixed() {
    for h in 1..=5 {
        let dm = d(h);
        let ms = list_matchings(&dm).unwrap();
        let hs = heights(&dm, &ms);
        let rings: HashSet<&[i64]> = hs.iter().map(|h| h.ring_values()).collect();
        assert_eq!(rings.len(), 1, "ring heights depend on the matching at D_{}", dm.order());
        let distinct: HashSet<&[i64]> = hs.iter().map(|h| h.values()).collect();
        assert_eq!(distinct.len(), ms.len(), "heights determine the matching");
    }
}

#[test]
fn flips_change_one_face_by_six() {
    for h in 1..=5 {
        let dm = d(h);
        for m in list_matchings(&dm).unwrap() {
            let h0 = height_function(&dm, &m).unwrap();
            for f in flippable_faces(&dm, &m) {
                let m1 = apply_flip(&dm, &m, f).unwrap();
                assert!(m1.is_perfect(&dm).unwrap());
                let h1 = height_function(&dm, &m1).unwrap();
                for g in 0..dm.squares().len() as u32 {
                    let diff = h1.at(g) - h0.at(g);
                    if g == f {
                        let want = match flip_direction(&dm, &m, f).unwrap() {
                            FlipDirection::Up => 6,
                            FlipDirection::Down => -6,
                        };
                        assert_eq!(diff, want);
                    } else {
                        assert_eq!(diff, 0);
                    }
                }
                assert_eq!(apply_flip(&dm, &m1, f).unwrap(), m);
            }
        }
    }
}

#[test]
fn half_order_flip_toggles() {
    let dm = d(1);
    let ms = list_matchings(&dm).unwrap();
    for m in &ms {
        let f = flippable_faces(&dm, m);
        assert_eq!(f.len(), 1);
        let other = apply_flip(&dm, m, f[0]).unwrap();
        assert!(ms.contains(&other) && other != *m);
    }
}

#[test]
fn flip_on_unflippable_face_is_an_error() {
    let dm = d(2);
    let m = minimal_matching(&dm).unwrap();
    let stuck: Vec<u32> = (0..3).filter(|f| !flippable_faces(&dm, &m).contains(f)).collect();
    assert!(!stuck.is_empty());
    assert!(apply_flip(&dm, &m, stuck[0]).is_err());
}

#[test]
fn flip_graphs_are_connected() {
    for h in 1..=4 {
        let dm = d(h);
        let ms = list_matchings(&dm).unwrap();
        let mut seen = HashSet::from([ms[0].clone()]);
        let mut queue = VecDeque::from([ms[0].clone()]);
        while let Some(m) = queue.pop_front() {
            for f in flippable_faces(&dm, &m) {
                let n = apply_flip(&dm, &m, f).unwrap();
                if seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
        assert_eq!(seen.len(), ms.len());
    }
}

#[test]
fn minimal_matching_is_the_unique_lowest() {
    for h in 1..=5 {
        let dm = d(h);
        let ms = list_matchings(&dm).unwrap();
        let hs = heights(&dm, &ms);
        let min = minimal_matching(&dm).unwrap();
        let hmin = height_function(&dm, &min).unwrap();
        for hh in &hs {
            assert!(hh.values().iter().zip(hmin.values()).all(|(a, b)| a >= b));
        }
        let lowest: Vec<_> = ms
            .iter()
            .filter(|m| flippable_faces(&dm, m).iter().all(|&f| flip_direction(&dm, m, f) == Some(FlipDirection::Up)))
            .collect();
        assert_eq!(lowest, vec![&min]);
    }
}

#[test]
fn upward_flips_telescope() {
    let dm = d(2);
    let mut m = minimal_matching(&dm).unwrap();
    let h0 = height_function(&dm, &m).unwrap();
    for k in 1..=3i64 {
        let f = flippable_faces(&dm, &m)
            .into_iter()
            .find(|&f| flip_direction(&dm, &m, f) == Some(FlipDirection::Up))
            .expect("an upward flip");
        m = apply_flip(&dm, &m, f).unwrap();
        let h = height_function(&dm, &m).unwrap();
        let total: i64 = h0.values().iter().zip(h.values()).map(|(a, b)| (a - b) / 6).sum();
        assert_eq!(total, -k);
    }
}

#[test]
fn meet_is_pointwise_minimum_exhaustively() {
    for h in 0..=4 {
        let dm = d(h);
        let ms = list_matchings(&dm).unwrap();
        let hs = heights(&dm, &ms);
        let index: HashMap<&Matching, usize> = ms.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let min = minimal_matching(&dm).unwrap();
        for i in 0..ms.len() {
            assert_eq!(meet(&dm, &ms[i], &ms[i]).unwrap(), ms[i]);
            assert_eq!(meet(&dm, &ms[i], &min).unwrap(), min);
            for j in 0..ms.len() {
                let x = meet(&dm, &ms[i], &ms[j]).unwrap();
                assert!(x.is_perfect(&dm).unwrap());
                let hx = height_function(&dm, &x).unwrap();
                assert_eq!(hx, hs[i].min(&hs[j]));
                assert_eq!(x, meet(&dm, &ms[j], &ms[i]).unwrap());
                let _ = index[&x];
            }
        }
    }
}

#[test]
fn meet_is_associative_exhaustively() {
    for h in 0..=4 {
        let dm = d(h);
        let ms = list_matchings(&dm).unwrap();
        let n = ms.len();
        let mut table = vec![vec![0usize; n]; n];
        let index: HashMap<&Matching, usize> = ms.iter().enumerate().map(|(i, m)| (m, i)).collect();
        for i in 0..n {
            for j in 0..n {
                table[i][j] = index[&meet(&dm, &ms[i], &ms[j]).unwrap()];
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert_eq!(table[table[i][j]][k], table[i][table[j][k]]);
                }
            }
        }
    }
}

#[test]
fn rebasing_and_json() {
    let dm = d(2);
    let m = minimal_matching(&dm).unwrap();
    let h = height_function_with_base(&dm, &m, 1, 100).unwrap();
    assert_eq!(h.at(1), 100);
    assert!(height_function_with_base(&dm, &m, 9, 0).is_err());
    let j = h.to_json(&dm);
    assert!(j.starts_with("[{\"face_center\":"));
    assert_eq!(j.matches("\"h\":").count(), 3);
}

#[test]
fn imperfect_matching_has_no_height() {
    let dm = d(2);
    let m = Matching::from_edge_ids(&dm, [0]).unwrap();
    assert!(height_function(&dm, &m).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn random_flip_walks_keep_heights_consistent(seed in any::<u64>(), h in 1u32..=8, steps in prop::collection::vec(any::<u16>(), 1..20)) {
        let (dm, mut m) = sample(Order::from_halves(h), seed).unwrap();
        let mut hm = height_function(&dm, &m).unwrap();
        for s in steps {
            let faces = flippable_faces(&dm, &m);
            prop_assert!(!faces.is_empty());
            let f = faces[s as usize % faces.len()];
            let dir = flip_direction(&dm, &m, f).unwrap();
            m = apply_flip(&dm, &m, f).unwrap();
            let h1 = height_function(&dm, &m).unwrap();
            for g in 0..dm.squares().len() as u32 {
                let want = if g != f { 0 } else if dir == FlipDirection::Up { 6 } else { -6 };
                prop_assert_eq!(h1.at(g) - hm.at(g), want);
            }
            hm = h1;
        }
    }
}
