//! The diamond graphs `D_m`, finite induced subgraphs of the lattice.
//!
//! Integer diamonds `D_n` are unions of `2n² - 2n + 1` standard cells whose
//! stars form a rhombus; half-integer diamonds `D_{n+1/2}` are unions of `2n²`
//! reflected cells plus two extra squares. Both families are placed so that
//! one shuffle step carries `D_m` exactly onto `D_{m+1/2}`.

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::height::DualGraph;
use crate::lattice::{
    band_of, cell_at_star, classify, kind_of, neighbor_offsets, square_unchecked, Cell, CellBase, CellParity, EdgeKind,
    LatticeEdge, LatticePoint, Orientation, Square, VertexKind,
};
use crate::order::Order;

/// An edge of a diamond, given by the indices of its endpoints (`u < v`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub kind: EdgeKind,
}

#[derive(Debug)]
pub struct Diamond {
    order: Order,
    vertices: Vec<LatticePoint>,
    vertex_index: HashMap<LatticePoint, u32>,
    edges: Vec<Edge>,
    edge_index: HashMap<(u32, u32), u32>,
    /// Edge ids at each vertex, ordered by the other endpoint.
    incidence: Vec<Vec<u32>>,
    faces: Vec<Square>,
    face_index: HashMap<Square, u32>,
    /// Edge ids around each face, in boundary order (long, short, short, long).
    face_edges: Vec<[u32; 4]>,
    cells: Vec<Cell>,
    extra_squares: Vec<Square>,
    boundary: Vec<u32>,
    dual: OnceLock<DualGraph>,
}

/// Counts describing a diamond.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeReport {
    pub order: Order,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub square_count: usize,
    pub matching_size: usize,
}

/// Number of edges in a perfect matching of `D_m`: `n(3n+1)` for `m = n`
/// and `3n² + 4n + 2` for `m = n + 1/2`.
pub fn matching_size(m: Order) -> u64 {
    let n = u64::from(m.floor());
    if m.is_integer() {
        n * (3 * n + 1)
    } else {
        3 * n * n + 4 * n + 2
    }
}

/// Cells and extra squares making up `D_m`.
fn layout(m: Order) -> (Vec<Cell>, Vec<Square>) {
    let n = m.floor() as i32;
    let mut cells = Vec::new();
    let mut extra = Vec::new();
    if m == Order::ZERO {
        return (cells, extra);
    }
    if m.is_integer() {
        let base = LatticePoint::new(12 * n - 3, 3);
        for u in 0..n {
            for v in 0..n {
                let star = base + LatticePoint::new(-6 * u, 6 * u + 6 * v);
                if u >= 1 {
                    cells.push(cell_at_star(star, CellParity::Standard, CellBase::N));
                }
                if u < n - 1 || v == 0 {
                    cells.push(cell_at_star(star, CellParity::Standard, CellBase::S));
                }
            }
        }
    } else {
        let base = LatticePoint::new(12 * n, 3);
        for u in 0..n {
            for v in 0..=n {
                let star = base + LatticePoint::new(-6 * u, 6 * u + 6 * v);
                if v >= 1 {
                    cells.push(cell_at_star(star, CellParity::Reflected, CellBase::N));
                }
                if v < n {
                    cells.push(cell_at_star(star, CellParity::Reflected, CellBase::S));
                }
            }
        }
        extra.push(square_unchecked(LatticePoint::new(6 * n, 6 * n), Orientation::NE));
        if n >= 1 {
            extra.push(square_unchecked(LatticePoint::new(6 * n + 6, 6 * n), Orientation::NW));
        }
    }
    cells.sort();
    (cells, extra)
}

/// Builds `D_m`. `D_0` is the empty graph and `D_{1/2}` a single NE square.
pub fn build_diamond(m: Order) -> Result<Diamond> {
    let (cells, extra_squares) = layout(m);
    let mut set: HashSet<LatticePoint> = HashSet::default();
    for s in cells.iter().flat_map(|c| c.squares.iter()).chain(extra_squares.iter()) {
        set.extend(s.vertices());
    }
    let d = Diamond::from_vertex_set(m, set, cells, extra_squares)?;
    let expected = 2 * matching_size(m) as usize;
    if d.vertices.len() != expected {
        return Err(Error::Invariant(format!(
            "D_{m} has {} vertices, expected {expected}",
            d.vertices.len()
        )));
    }
    if !d.vertices.is_empty() {
        let euler = d.vertices.len() as i64 - d.edges.len() as i64 + d.faces.len() as i64;
        if euler != 1 {
            return Err(Error::Invariant(format!("D_{m} is not a disk: V - E + F = {euler}")));
        }
    }
    Ok(d)
}

impl Diamond {
    fn from_vertex_set(
        order: Order,
        set: HashSet<LatticePoint>,
        cells: Vec<Cell>,
        extra_squares: Vec<Square>,
    ) -> Result<Diamond> {
        let mut vertices: Vec<LatticePoint> = set.into_iter().collect();
        vertices.sort_unstable();
        let vertex_index: HashMap<LatticePoint, u32> =
            vertices.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();

        let mut edges = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for &(d, kind) in neighbor_offsets(v) {
                if let Some(&j) = vertex_index.get(&(v + d)) {
                    if (i as u32) < j {
                        edges.push(Edge { u: i as u32, v: j, kind });
                    }
                }
            }
        }
        edges.sort_unstable();
        let edge_index: HashMap<(u32, u32), u32> =
            edges.iter().enumerate().map(|(k, e)| ((e.u, e.v), k as u32)).collect();

        let mut incidence = vec![Vec::new(); vertices.len()];
        for (k, e) in edges.iter().enumerate() {
            incidence[e.u as usize].push(k as u32);
            incidence[e.v as usize].push(k as u32);
        }
        for (i, list) in incidence.iter_mut().enumerate() {
            list.sort_by_key(|&k| {
                let e = edges[k as usize];
                if e.u as usize == i {
                    e.v
                } else {
                    e.u
                }
            });
        }

        let mut faces = Vec::new();
        for &v in &vertices {
            if kind_of(v) == Some(VertexKind::Center) {
                for o in Orientation::ALL {
                    let s = square_unchecked(v, o);
                    if s.vertices().iter().all(|x| vertex_index.contains_key(x)) {
                        faces.push(s);
                    }
                }
            }
        }
        faces.sort_unstable();
        let face_index = faces.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();

        let lookup = |e: LatticeEdge| -> u32 {
            let (a, b) = e.endpoints();
            let (i, j) = (vertex_index[&a], vertex_index[&b]);
            edge_index[&(i.min(j), i.max(j))]
        };
        let face_edges = faces.iter().map(|s| s.edges().map(lookup)).collect();

        let boundary = vertices
            .iter()
            .enumerate()
            .filter(|&(i, &v)| incidence[i].len() < classify(v).map(|k| k.degree()).unwrap_or(0))
            .map(|(i, _)| i as u32)
            .collect();

        Ok(Diamond {
            order,
            vertices,
            vertex_index,
            edges,
            edge_index,
            incidence,
            faces,
            face_index,
            face_edges,
            cells,
            extra_squares,
            boundary,
            dual: OnceLock::new(),
        })
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// Vertices in lexicographic order; a vertex's id is its position here.
    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    /// Edges sorted by endpoint ids; an edge's id is its position here.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The bounded faces (all of them lattice squares), sorted.
    pub fn squares(&self) -> &[Square] {
        &self.faces
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// The squares outside the cells of a half-integer diamond (`L_n`, `R_n`).
    pub fn extra_squares(&self) -> &[Square] {
        &self.extra_squares
    }

    /// Vertices with fewer neighbors in the diamond than in the lattice.
    pub fn boundary_vertices(&self) -> &[u32] {
        &self.boundary
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex_id(&self, v: LatticePoint) -> Option<u32> {
        self.vertex_index.get(&v).copied()
    }

    pub fn vertex(&self, id: u32) -> LatticePoint {
        self.vertices[id as usize]
    }

    pub fn edge(&self, id: u32) -> Edge {
        self.edges[id as usize]
    }

    pub fn edge_between(&self, u: u32, v: u32) -> Option<u32> {
        self.edge_index.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn edge_id(&self, e: LatticeEdge) -> Option<u32> {
        let (a, b) = e.endpoints();
        self.edge_between(self.vertex_id(a)?, self.vertex_id(b)?)
    }

    pub fn lattice_edge(&self, id: u32) -> LatticeEdge {
        let e = self.edges[id as usize];
        LatticeEdge::sorted(self.vertex(e.u), self.vertex(e.v))
    }

    /// Edge ids incident to a vertex, ordered by the other endpoint.
    pub fn incident_edges(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    pub fn other_end(&self, edge: u32, v: u32) -> u32 {
        let e = self.edges[edge as usize];
        if e.u == v {
            e.v
        } else {
            e.u
        }
    }

    pub fn face_id(&self, s: &Square) -> Option<u32> {
        self.face_index.get(s).copied()
    }

    pub fn face_edges(&self, face: u32) -> [u32; 4] {
        self.face_edges[face as usize]
    }

    /// Strip index of a square: its horizontal band, counted from the band
    /// of the central cell (integer orders) or of `L_n` (half-integer orders).
    pub fn strip_of(&self, s: &Square) -> Result<i32> {
        if self.face_id(s).is_none() {
            return Err(Error::Domain(format!(
                "{} square at {} is not in D_{}",
                s.orientation, s.center, self.order
            )));
        }
        let n = self.order.floor() as i32;
        let central = if self.order.is_integer() { n - 1 } else { n };
        Ok(band_of(s) - central)
    }

    /// Number of distinct strips met by the diamond's squares.
    pub fn strip_count(&self) -> usize {
        self.faces.iter().map(band_of).collect::<HashSet<_>>().len()
    }

    /// The central cell of an integer diamond: the middle cell of the central
    /// strip, counting west to east with N before S at a shared star.
    pub fn central_cell(&self) -> Option<Cell> {
        if !self.order.is_integer() || self.cells.is_empty() {
            return None;
        }
        let n = self.order.floor() as i32;
        let mut strip: Vec<Cell> =
            self.cells.iter().copied().filter(|c| band_of(&c.squares[0]) == n - 1).collect();
        strip.sort_by_key(|c| (c.star.p, c.base));
        strip.get(strip.len() / 2).copied()
    }

    pub fn size_report(&self) -> SizeReport {
        SizeReport {
            order: self.order,
            vertex_count: self.vertices.len(),
            edge_count: self.edges.len(),
            square_count: self.faces.len(),
            matching_size: self.vertices.len() / 2,
        }
    }

    pub(crate) fn dual(&self) -> &DualGraph {
        self.dual.get_or_init(|| DualGraph::new(self))
    }

    /// JSON with sorted keys: `{edges, order, squares, vertices}`.
    pub fn to_json(&self) -> String {
        let doc = DiamondDoc {
            order: self.order,
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|e| (e.u, e.v, e.kind)).collect(),
            squares: self
                .faces
                .iter()
                .zip(&self.face_edges)
                .map(|(s, _)| SquareDoc {
                    center: s.center,
                    orientation: s.orientation,
                    vertices: s.vertices().map(|v| self.vertex_index[&v]),
                })
                .collect(),
        };
        crate::json::to_sorted_string(&doc)
    }

    /// Parses a diamond document and checks it against a fresh construction
    /// of the same order.
    pub fn from_json(text: &str) -> Result<Diamond> {
        let doc: DiamondDoc = serde_json::from_str(text)?;
        let d = build_diamond(doc.order)?;
        let same_vertices = doc.vertices == d.vertices;
        let same_edges = doc.edges.len() == d.edges.len()
            && doc.edges.iter().zip(&d.edges).all(|(&(u, v, k), e)| u == e.u && v == e.v && k == e.kind);
        let same_squares = doc.squares.len() == d.faces.len()
            && doc.squares.iter().zip(&d.faces).all(|(sd, s)| {
                sd.center == s.center
                    && sd.orientation == s.orientation
                    && sd.vertices == s.vertices().map(|v| d.vertex_index[&v])
            });
        if same_vertices && same_edges && same_squares {
            Ok(d)
        } else {
            Err(Error::Domain(format!("document does not describe D_{}", doc.order)))
        }
    }
}

impl PartialEq for Diamond {
    fn eq(&self, other: &Diamond) -> bool {
        self.order == other.order
            && self.vertices == other.vertices
            && self.edges == other.edges
            && self.faces == other.faces
    }
}

impl Eq for Diamond {}

#[derive(Serialize, Deserialize)]
struct DiamondDoc {
    order: Order,
    vertices: Vec<LatticePoint>,
    edges: Vec<(u32, u32, EdgeKind)>,
    squares: Vec<SquareDoc>,
}

#[derive(Serialize, Deserialize)]
struct SquareDoc {
    center: LatticePoint,
    orientation: Orientation,
    vertices: [u32; 4],
}
