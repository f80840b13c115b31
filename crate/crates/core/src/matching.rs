//! Matchings on a diamond, plaquette flips, minimal matchings and meets.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::diamond::Diamond;
use crate::error::{Error, Result};
use crate::height::{height_function, HeightFunction};
use crate::lattice::{squares_beside, LatticeEdge};
use crate::order::Order;

/// A set of vertex-disjoint edges of one diamond, stored as a bitmask over
/// the diamond's sorted edge list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    order: Order,
    edges: FixedBitSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipDirection {
    Up,
    Down,
}

#[derive(Serialize, Deserialize)]
struct MatchingDoc {
    order: Order,
    edges: Vec<(u32, u32)>,
}

impl Matching {
    pub fn empty(d: &Diamond) -> Matching {
        Matching { order: d.order(), edges: FixedBitSet::with_capacity(d.edges().len()) }
    }

    /// Builds a matching from edge ids, rejecting unknown ids and shared vertices.
    pub fn from_edge_ids(d: &Diamond, ids: impl IntoIterator<Item = u32>) -> Result<Matching> {
        let mut m = Matching::empty(d);
        let mut used = FixedBitSet::with_capacity(d.vertices().len());
        for id in ids {
            if id as usize >= d.edges().len() {
                return Err(Error::Domain(format!("edge {id} is not in D_{}", d.order())));
            }
            let e = d.edge(id);
            if used.put(e.u as usize) | used.put(e.v as usize) {
                return Err(Error::Domain(format!("edge {id} shares a vertex with another edge")));
            }
            m.edges.insert(id as usize);
        }
        Ok(m)
    }

    pub fn from_lattice_edges(d: &Diamond, edges: impl IntoIterator<Item = LatticeEdge>) -> Result<Matching> {
        let ids = edges
            .into_iter()
            .map(|e| d.edge_id(e).ok_or_else(|| Error::Domain(format!("edge {e} is not in D_{}", d.order()))))
            .collect::<Result<Vec<_>>>()?;
        Matching::from_edge_ids(d, ids)
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn contains(&self, edge: u32) -> bool {
        self.edges.contains(edge as usize)
    }

    pub fn len(&self) -> usize {
        self.edges.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Matched edge ids in increasing order.
    pub fn edge_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.edges.ones().map(|i| i as u32)
    }

    pub fn lattice_edges(&self, d: &Diamond) -> Vec<LatticeEdge> {
        self.edge_ids().map(|e| d.lattice_edge(e)).collect()
    }

    pub(crate) fn check_diamond(&self, d: &Diamond) -> Result<()> {
        if self.order != d.order() || self.edges.len() != d.edges().len() {
            return Err(Error::DiamondMismatch { expected: d.order(), found: self.order });
        }
        Ok(())
    }

    /// True when every vertex of the diamond is covered exactly once.
    pub fn is_perfect(&self, d: &Diamond) -> Result<bool> {
        self.check_diamond(d)?;
        let mut covered = FixedBitSet::with_capacity(d.vertices().len());
        for id in self.edge_ids() {
            let e = d.edge(id);
            if covered.put(e.u as usize) | covered.put(e.v as usize) {
                return Ok(false);
            }
        }
        Ok(covered.count_ones(..) == d.vertices().len())
    }

    /// For each vertex, the matched edge covering it.
    pub fn partners(&self, d: &Diamond) -> Vec<Option<u32>> {
        let mut out = vec![None; d.vertices().len()];
        for id in self.edge_ids() {
            let e = d.edge(id);
            out[e.u as usize] = Some(id);
            out[e.v as usize] = Some(id);
        }
        out
    }

    fn toggled(&self, ids: &[u32]) -> Matching {
        let mut m = self.clone();
        for &i in ids {
            m.edges.toggle(i as usize);
        }
        m
    }

    /// `{edges: [[u, v], ...], order}` with vertex ids into the diamond's vertex list.
    pub fn to_json(&self, d: &Diamond) -> String {
        let doc = MatchingDoc {
            order: self.order,
            edges: self.edge_ids().map(|id| (d.edge(id).u, d.edge(id).v)).collect(),
        };
        crate::json::to_sorted_string(&doc)
    }

    /// Order named by a matching document, so the caller can build its diamond.
    pub fn order_of_json(text: &str) -> Result<Order> {
        Ok(serde_json::from_str::<MatchingDoc>(text)?.order)
    }

    pub fn from_json(d: &Diamond, text: &str) -> Result<Matching> {
        let doc: MatchingDoc = serde_json::from_str(text)?;
        if doc.order != d.order() {
            return Err(Error::DiamondMismatch { expected: d.order(), found: doc.order });
        }
        let ids = doc
            .edges
            .iter()
            .map(|&(u, v)| {
                d.edge_between(u, v)
                    .ok_or_else(|| Error::Domain(format!("vertices {u} and {v} are not adjacent in D_{}", d.order())))
            })
            .collect::<Result<Vec<_>>>()?;
        Matching::from_edge_ids(d, ids)
    }
}

/// Free-function form of [`Matching::is_perfect`].
pub fn is_perfect(d: &Diamond, m: &Matching) -> Result<bool> {
    m.is_perfect(d)
}

/// Which way a flip at `face` would move the height there, or `None` when
/// the face's boundary does not carry two opposite matched edges.
pub fn flip_direction(d: &Diamond, m: &Matching, face: u32) -> Option<FlipDirection> {
    let e = d.face_edges(face);
    let pair = if m.contains(e[0]) && m.contains(e[2]) {
        0
    } else if m.contains(e[1]) && m.contains(e[3]) {
        1
    } else {
        return None;
    };
    // Removing matched edges whose arrows point into the face raises its height.
    if d.dual().points_inward(face, pair) {
        Some(FlipDirection::Up)
    } else {
        Some(FlipDirection::Down)
    }
}

pub fn flippable_faces(d: &Diamond, m: &Matching) -> Vec<u32> {
    (0..d.squares().len() as u32).filter(|&f| flip_direction(d, m, f).is_some()).collect()
}

/// Swaps the matched pair of edges around `face` for the other pair.
pub fn apply_flip(d: &Diamond, m: &Matching, face: u32) -> Result<Matching> {
    m.check_diamond(d)?;
    if face as usize >= d.squares().len() {
        return Err(Error::Domain(format!("face {face} is not a square of D_{}", d.order())));
    }
    if flip_direction(d, m, face).is_none() {
        return Err(Error::Precondition(format!("face {face} is not flippable")));
    }
    Ok(m.toggled(&d.face_edges(face)))
}

/// Applies downward flips until none remain, starting from `start`.
pub fn descend(d: &Diamond, start: &Matching) -> Result<Matching> {
    start.check_diamond(d)?;
    let faces = d.squares().len();
    let mut faces_of_edge = vec![Vec::new(); d.edges().len()];
    for f in 0..faces as u32 {
        for e in d.face_edges(f) {
            faces_of_edge[e as usize].push(f);
        }
    }
    let mut m = start.clone();
    let mut queued = FixedBitSet::with_capacity(faces);
    queued.insert_range(..);
    let mut queue: VecDeque<u32> = (0..faces as u32).collect();
    while let Some(f) = queue.pop_front() {
        queued.set(f as usize, false);
        if flip_direction(d, &m, f) == Some(FlipDirection::Down) {
            let edges = d.face_edges(f);
            m = m.toggled(&edges);
            for e in edges {
                for &g in &faces_of_edge[e as usize] {
                    if !queued.put(g as usize) {
                        queue.push_back(g);
                    }
                }
            }
        }
    }
    Ok(m)
}

/// The perfect matching of least height: every flip available from it goes up.
pub fn minimal_matching(d: &Diamond) -> Result<Matching> {
    let start = crate::shuffle::some_perfect_matching(d)?;
    descend(d, &start)
}

/// The perfect matching whose height function is the pointwise minimum of
/// the heights of `m1` and `m2`.
///
/// Edges in both matchings are kept. The remaining edges form alternating
/// loops; across any loop edge the two heights differ by 6 more on one side
/// than on the other, and each loop takes the edges of whichever matching is
/// lower along it.
pub fn meet(d: &Diamond, m1: &Matching, m2: &Matching) -> Result<Matching> {
    let (h1, h2) = (height_function(d, m1)?, height_function(d, m2)?);
    meet_with_heights(d, m1, &h1, m2, &h2)
}

pub(crate) fn meet_with_heights(
    d: &Diamond,
    m1: &Matching,
    h1: &HeightFunction,
    m2: &Matching,
    h2: &HeightFunction,
) -> Result<Matching> {
    let dual = d.dual();
    let p1 = m1.partners(d);
    let p2 = m2.partners(d);
    let mut out = m1.clone();
    let mut visited = FixedBitSet::with_capacity(d.edges().len());
    let gap = |s| {
        let f = dual.face_index(&s).expect("squares beside a diamond edge are dual nodes") as usize;
        h1.all_values()[f] - h2.all_values()[f]
    };
    for start in m1.edge_ids() {
        if m2.contains(start) || visited.contains(start as usize) {
            continue;
        }
        // Walk the loop, alternating between edges of m1 and m2.
        let mut loop_edges = Vec::new();
        let mut e = start;
        let mut v = d.edge(start).v;
        let mut in_first = true;
        loop {
            visited.insert(e as usize);
            loop_edges.push(e);
            let next = if in_first { p2[v as usize] } else { p1[v as usize] };
            let next = next.ok_or_else(|| Error::Precondition("meet needs perfect matchings".into()))?;
            if next == start {
                break;
            }
            v = d.other_end(next, v);
            e = next;
            in_first = !in_first;
        }
        let [a, b] = squares_beside(d.lattice_edge(start));
        if gap(a) + gap(b) > 0 {
            for &x in &loop_edges {
                out.edges.toggle(x as usize);
            }
        }
    }
    Ok(out)
}
