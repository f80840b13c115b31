//! Height functions on the faces of a diamond.
//!
//! The dual graph has a node for every square of the diamond and for every
//! square of the surrounding ring (lattice squares sharing at least one vertex
//! with the diamond). Each lattice edge with an endpoint in the diamond carries
//! one dual arrow, oriented so that the edge's black endpoint is on its left.
//! Crossing an arrow raises the height by `H(e) - 6·[e ∈ M]`, with `H = 1` for
//! long edges and `H = 2` for short ones. Heights on the ring do not depend on
//! the matching, so fixing the smallest ring square at height 0 gives every
//! perfect matching a canonical height function.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use serde::Serialize;

use crate::diamond::Diamond;
use crate::error::{Error, Result};
use crate::lattice::{squares_beside, squares_containing, EdgeKind, LatticeEdge, LatticePoint, Orientation, Square};
use crate::matching::Matching;
use crate::order::Order;

/// Height change `H(e)` across a lattice edge of the given kind.
pub const fn height_change(kind: EdgeKind) -> i64 {
    match kind {
        EdgeKind::Long => 1,
        EdgeKind::Short => 2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DualArrow {
    pub from: u32,
    pub to: u32,
    pub crossed: LatticeEdge,
    /// Id of the crossed edge when it belongs to the diamond.
    pub diamond_edge: Option<u32>,
}

impl DualArrow {
    pub fn height_change(&self) -> i64 {
        height_change(self.crossed.kind())
    }
}

#[derive(Debug)]
pub struct DualGraph {
    /// The diamond's squares (same ids) followed by the ring squares.
    faces: Vec<Square>,
    interior: usize,
    index: HashMap<Square, u32>,
    arrows: Vec<DualArrow>,
    /// Arrows at each dual node, with `true` when the node is the head.
    at_face: Vec<Vec<(u32, bool)>>,
    /// For each boundary edge of each diamond square: does its arrow point into the square?
    inward: Vec<[bool; 4]>,
    base: Option<u32>,
}

fn cross(a: LatticePoint, b: LatticePoint) -> i64 {
    i64::from(a.p) * i64::from(b.q) - i64::from(a.q) * i64::from(b.p)
}

impl DualGraph {
    pub(crate) fn new(d: &Diamond) -> DualGraph {
        let mut faces: Vec<Square> = d.squares().to_vec();
        let interior = faces.len();
        let inside: HashSet<Square> = faces.iter().copied().collect();
        let mut ring: Vec<Square> = d
            .vertices()
            .iter()
            .flat_map(|&v| squares_containing(v))
            .filter(|s| !inside.contains(s))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        ring.sort_unstable();
        let base = (!ring.is_empty()).then_some(interior as u32);
        faces.extend(ring);
        let index: HashMap<Square, u32> = faces.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();

        let mut arrows = Vec::new();
        let mut seen = HashSet::default();
        for s in &faces {
            for e in s.edges() {
                let (a, b) = e.endpoints();
                if d.vertex_id(a).is_none() && d.vertex_id(b).is_none() {
                    continue;
                }
                if !seen.insert(e) {
                    continue;
                }
                let [f, g] = squares_beside(e);
                let (fi, gi) = (index[&f], index[&g]);
                let delta = g.centroid_x4() - f.centroid_x4();
                let black = e.black();
                let to_black = LatticePoint::new(4 * black.p, 4 * black.q) - f.centroid_x4();
                let (from, to) = if cross(delta, to_black) > 0 { (fi, gi) } else { (gi, fi) };
                arrows.push(DualArrow { from, to, crossed: e, diamond_edge: d.edge_id(e) });
            }
        }
        arrows.sort_unstable_by_key(|a| (a.from, a.to, a.crossed));

        let mut at_face = vec![Vec::new(); faces.len()];
        for (k, a) in arrows.iter().enumerate() {
            at_face[a.from as usize].push((k as u32, false));
            at_face[a.to as usize].push((k as u32, true));
        }

        let by_edge: HashMap<LatticeEdge, usize> = arrows.iter().enumerate().map(|(k, a)| (a.crossed, k)).collect();
        let inward = (0..interior)
            .map(|f| faces[f].edges().map(|e| arrows[by_edge[&e]].to == f as u32))
            .collect();

        DualGraph { faces, interior, index, arrows, at_face, inward, base }
    }

    pub fn faces(&self) -> &[Square] {
        &self.faces
    }

    pub fn interior_count(&self) -> usize {
        self.interior
    }

    pub fn arrows(&self) -> &[DualArrow] {
        &self.arrows
    }

    pub fn face_index(&self, s: &Square) -> Option<u32> {
        self.index.get(s).copied()
    }

    /// Whether the arrow across boundary edge `k` of diamond square `face` points into it.
    pub fn points_inward(&self, face: u32, k: usize) -> bool {
        self.inward[face as usize][k]
    }
}

/// Heights of a perfect matching on every dual node: the diamond's squares
/// and the ring around them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeightFunction {
    order: Order,
    interior: usize,
    values: Vec<i64>,
}

#[derive(Serialize)]
struct HeightRecord {
    face_center: LatticePoint,
    orientation: Orientation,
    h: i64,
}

impl HeightFunction {
    pub fn order(&self) -> Order {
        self.order
    }

    /// Heights of the diamond's squares, indexed like `Diamond::squares`.
    pub fn values(&self) -> &[i64] {
        &self.values[..self.interior]
    }

    /// Height of a diamond square.
    pub fn at(&self, face: u32) -> i64 {
        self.values[face as usize]
    }

    /// Heights of the ring squares, in the order of `DualGraph::faces`.
    pub fn ring_values(&self) -> &[i64] {
        &self.values[self.interior..]
    }

    pub(crate) fn all_values(&self) -> &[i64] {
        &self.values
    }

    /// Shifts all heights so that `face` has height `value`.
    pub fn rebased(&self, face: u32, value: i64) -> HeightFunction {
        let shift = value - self.values[face as usize];
        HeightFunction {
            order: self.order,
            interior: self.interior,
            values: self.values.iter().map(|h| h + shift).collect(),
        }
    }

    /// Pointwise minimum of two height functions on the same diamond.
    pub fn min(&self, other: &HeightFunction) -> HeightFunction {
        HeightFunction {
            order: self.order,
            interior: self.interior,
            values: self.values.iter().zip(&other.values).map(|(a, b)| *a.min(b)).collect(),
        }
    }

    /// `[{face_center, h, orientation}, ...]` in square order.
    pub fn to_json(&self, d: &Diamond) -> String {
        let recs: Vec<HeightRecord> = d
            .squares()
            .iter()
            .zip(self.values())
            .map(|(s, &h)| HeightRecord { face_center: s.center, orientation: s.orientation, h })
            .collect();
        crate::json::to_sorted_string(&recs)
    }
}

/// Height function of a perfect matching, with the smallest ring square at height 0.
pub fn height_function(d: &Diamond, m: &Matching) -> Result<HeightFunction> {
    m.check_diamond(d)?;
    if !m.is_perfect(d)? {
        return Err(Error::Precondition("height functions need a perfect matching".into()));
    }
    let dual = d.dual();
    let n = dual.faces.len();
    let mut values = vec![0i64; n];
    if let Some(base) = dual.base {
        let mut known = vec![false; n];
        known[base as usize] = true;
        let mut queue = VecDeque::from([base]);
        let step = |a: &DualArrow| -> i64 {
            let matched = a.diamond_edge.is_some_and(|e| m.contains(e));
            a.height_change() - if matched { 6 } else { 0 }
        };
        while let Some(f) = queue.pop_front() {
            for &(k, head) in &dual.at_face[f as usize] {
                let a = &dual.arrows[k as usize];
                let (g, value) = if head {
                    (a.from, values[f as usize] - step(a))
                } else {
                    (a.to, values[f as usize] + step(a))
                };
                if known[g as usize] {
                    if values[g as usize] != value {
                        return Err(Error::Invariant(format!(
                            "height increments do not close up across {}",
                            a.crossed
                        )));
                    }
                } else {
                    known[g as usize] = true;
                    values[g as usize] = value;
                    queue.push_back(g);
                }
            }
        }
        if known.iter().any(|k| !k) {
            return Err(Error::Invariant("dual graph is disconnected".into()));
        }
    }
    Ok(HeightFunction { order: d.order(), interior: dual.interior, values })
}

/// Height function normalized so that `base_face` has height `base_value`.
pub fn height_function_with_base(d: &Diamond, m: &Matching, base_face: u32, base_value: i64) -> Result<HeightFunction> {
    if base_face as usize >= d.squares().len() {
        return Err(Error::Domain(format!("face {base_face} is not a square of D_{}", d.order())));
    }
    Ok(height_function(d, m)?.rebased(base_face, base_value))
}

/// Sum of `H` over the dual arrows around a vertex of the lattice, each taken
/// with sign `+1` when it runs counterclockwise around the vertex.
pub fn circulation_around(d: &Diamond, v: LatticePoint) -> Option<i64> {
    signed_sum_around(d, v, |a| a.height_change())
}

/// Signed sum of the height increments of `m` around a vertex, zero whenever
/// heights are well defined. Every closed dual loop is a sum of these.
pub fn loop_sum_around(d: &Diamond, m: &Matching, v: LatticePoint) -> Option<i64> {
    signed_sum_around(d, v, |a| a.height_change() - if a.diamond_edge.is_some_and(|e| m.contains(e)) { 6 } else { 0 })
}

fn signed_sum_around(d: &Diamond, v: LatticePoint, weight: impl Fn(&DualArrow) -> i64) -> Option<i64> {
    let dual = d.dual();
    let mut total = 0;
    for s in squares_containing(v) {
        dual.face_index(&s)?;
    }
    for a in &dual.arrows {
        if a.crossed.contains(v) {
            let f = dual.faces[a.from as usize].centroid_x4();
            let g = dual.faces[a.to as usize].centroid_x4();
            let v4 = LatticePoint::new(4 * v.p, 4 * v.q);
            let sign = if cross(g - f, v4 - f) > 0 { 1 } else { -1 };
            total += sign * weight(a);
        }
    }
    Some(total)
}
