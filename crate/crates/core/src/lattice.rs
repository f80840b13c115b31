//! The infinite dP3 lattice: a hexagonal lattice superimposed on its dual.
//!
//! Points use integer coordinates `(p, q)` in the triangular basis
//! `e1 = (1, 0)`, `e2 = (1/2, √3/2)` scaled by `1/3`, so hexagon centers sit on
//! multiples of 6, edge midpoints on the three residue classes `(3,0)`,
//! `(0,3)`, `(3,3)` and hexagon corners on `(2,2)` and `(4,4)`. Long edges
//! (center to midpoint) have length 1 and short edges (midpoint to corner)
//! length `√3/3`.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct LatticePoint {
    pub p: i32,
    pub q: i32,
}

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { p: 0, q: 0 };

    pub const fn new(p: i32, q: i32) -> LatticePoint {
        LatticePoint { p, q }
    }

    fn residue(self) -> (i32, i32) {
        (self.p.rem_euclid(6), self.q.rem_euclid(6))
    }

    /// Cartesian position, `x = p/3 + q/6`, `y = q·√3/6`.
    pub fn to_cartesian<T: Float>(self) -> (T, T) {
        let six = T::from(6).unwrap();
        let x = T::from(2 * self.p + self.q).unwrap() / six;
        let y = T::from(self.q).unwrap() * T::from(3).unwrap().sqrt() / six;
        (x, y)
    }

    /// 36 times the squared Cartesian length of this point read as a vector.
    pub fn norm_sq_36(self) -> i64 {
        let (p, q) = (i64::from(self.p), i64::from(self.q));
        (2 * p + q).pow(2) + 3 * q * q
    }
}

impl From<[i32; 2]> for LatticePoint {
    fn from([p, q]: [i32; 2]) -> Self {
        LatticePoint { p, q }
    }
}

impl From<LatticePoint> for [i32; 2] {
    fn from(v: LatticePoint) -> Self {
        [v.p, v.q]
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

impl Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.p + o.p, self.q + o.q)
    }
}

impl Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.p - o.p, self.q - o.q)
    }
}

impl Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint::new(-self.p, -self.q)
    }
}

const fn pt(p: i32, q: i32) -> LatticePoint {
    LatticePoint::new(p, q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    /// Hexagon center: white, degree 6.
    Center,
    /// Edge midpoint: black, degree 4.
    Midpoint,
    /// Hexagon corner: white, degree 3.
    Corner,
}

impl VertexKind {
    pub const fn degree(self) -> usize {
        match self {
            VertexKind::Center => 6,
            VertexKind::Midpoint => 4,
            VertexKind::Corner => 3,
        }
    }

    pub const fn is_black(self) -> bool {
        matches!(self, VertexKind::Midpoint)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// Center to midpoint, length 1.
    Long,
    /// Midpoint to corner, length √3/3.
    Short,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Orientation {
    N,
    NE,
    SE,
    S,
    SW,
    NW,
}

impl Orientation {
    pub const ALL: [Orientation; 6] = [
        Orientation::N,
        Orientation::NE,
        Orientation::SE,
        Orientation::S,
        Orientation::SW,
        Orientation::NW,
    ];

    /// Offset from a hexagon center to the corner of its square of this orientation.
    pub const fn corner_offset(self) -> LatticePoint {
        match self {
            Orientation::N => pt(-2, 4),
            Orientation::NE => pt(2, 2),
            Orientation::SE => pt(4, -2),
            Orientation::S => pt(2, -4),
            Orientation::SW => pt(-2, -2),
            Orientation::NW => pt(-4, 2),
        }
    }

    /// Offsets from the center to the two midpoints of the square, in
    /// counterclockwise order around the square starting at the center.
    pub const fn midpoint_offsets(self) -> [LatticePoint; 2] {
        match self {
            Orientation::NE => [pt(3, 0), pt(0, 3)],
            Orientation::N => [pt(0, 3), pt(-3, 3)],
            Orientation::NW => [pt(-3, 3), pt(-3, 0)],
            Orientation::SW => [pt(-3, 0), pt(0, -3)],
            Orientation::S => [pt(0, -3), pt(3, -3)],
            Orientation::SE => [pt(3, -3), pt(3, 0)],
        }
    }

    /// Compass angle in degrees, counterclockwise from east.
    pub const fn angle_degrees(self) -> u32 {
        match self {
            Orientation::NE => 30,
            Orientation::N => 90,
            Orientation::NW => 150,
            Orientation::SW => 210,
            Orientation::S => 270,
            Orientation::SE => 330,
        }
    }

    pub const fn opposite(self) -> Orientation {
        match self {
            Orientation::N => Orientation::S,
            Orientation::NE => Orientation::SW,
            Orientation::SE => Orientation::NW,
            Orientation::S => Orientation::N,
            Orientation::SW => Orientation::NE,
            Orientation::NW => Orientation::SE,
        }
    }

    pub const fn pair(self) -> OrientationPair {
        match self {
            Orientation::N | Orientation::S => OrientationPair::NorthSouth,
            Orientation::NE | Orientation::SW => OrientationPair::NortheastSouthwest,
            Orientation::NW | Orientation::SE => OrientationPair::NorthwestSoutheast,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Orientation::N => "N",
            Orientation::NE => "NE",
            Orientation::SE => "SE",
            Orientation::S => "S",
            Orientation::SW => "SW",
            Orientation::NW => "NW",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A pair of opposite orientations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrientationPair {
    NorthSouth,
    NortheastSouthwest,
    NorthwestSoutheast,
}

impl OrientationPair {
    pub const fn members(self) -> [Orientation; 2] {
        match self {
            OrientationPair::NorthSouth => [Orientation::N, Orientation::S],
            OrientationPair::NortheastSouthwest => [Orientation::NE, Orientation::SW],
            OrientationPair::NorthwestSoutheast => [Orientation::NW, Orientation::SE],
        }
    }

    /// The translation that flipping every kite of this pair induces on the
    /// lattice: the flip of a kite is again a kite, of the opposite
    /// orientation, whose points are the old ones moved by this vector.
    pub const fn flip_shift(self) -> LatticePoint {
        match self {
            OrientationPair::NortheastSouthwest => pt(3, 3),
            OrientationPair::NorthwestSoutheast => pt(6, 3),
            OrientationPair::NorthSouth => pt(3, 6),
        }
    }
}

/// Kind of `v`, or `None` off the lattice.
pub fn kind_of(v: LatticePoint) -> Option<VertexKind> {
    classify(v).ok()
}

pub fn classify(v: LatticePoint) -> Result<VertexKind> {
    match v.residue() {
        (0, 0) => Ok(VertexKind::Center),
        (3, 0) | (0, 3) | (3, 3) => Ok(VertexKind::Midpoint),
        (2, 2) | (4, 4) => Ok(VertexKind::Corner),
        _ => Err(Error::NotOnLattice(v)),
    }
}

/// Neighbor offsets of a point, long edges first. Empty if `v` is not on the lattice.
pub(crate) fn neighbor_offsets(v: LatticePoint) -> &'static [(LatticePoint, EdgeKind)] {
    use EdgeKind::{Long, Short};
    const C: [(LatticePoint, EdgeKind); 6] = [
        (pt(3, 0), Long),
        (pt(0, 3), Long),
        (pt(-3, 3), Long),
        (pt(-3, 0), Long),
        (pt(0, -3), Long),
        (pt(3, -3), Long),
    ];
    const M30: [(LatticePoint, EdgeKind); 4] =
        [(pt(3, 0), Long), (pt(-3, 0), Long), (pt(-1, 2), Short), (pt(1, -2), Short)];
    const M03: [(LatticePoint, EdgeKind); 4] =
        [(pt(0, 3), Long), (pt(0, -3), Long), (pt(2, -1), Short), (pt(-2, 1), Short)];
    const M33: [(LatticePoint, EdgeKind); 4] =
        [(pt(-3, 3), Long), (pt(3, -3), Long), (pt(1, 1), Short), (pt(-1, -1), Short)];
    const K22: [(LatticePoint, EdgeKind); 3] =
        [(pt(1, -2), Short), (pt(-2, 1), Short), (pt(1, 1), Short)];
    const K44: [(LatticePoint, EdgeKind); 3] =
        [(pt(2, -1), Short), (pt(-1, 2), Short), (pt(-1, -1), Short)];
    match v.residue() {
        (0, 0) => &C,
        (3, 0) => &M30,
        (0, 3) => &M03,
        (3, 3) => &M33,
        (2, 2) => &K22,
        (4, 4) => &K44,
        _ => &[],
    }
}

pub fn neighbors(v: LatticePoint) -> Result<Vec<(LatticePoint, EdgeKind)>> {
    classify(v)?;
    Ok(neighbor_offsets(v).iter().map(|&(d, k)| (v + d, k)).collect())
}

/// True when `v` and `w` are joined by a lattice edge.
pub fn adjacent(v: LatticePoint, w: LatticePoint) -> bool {
    neighbor_offsets(v).iter().any(|&(d, _)| v + d == w)
}

/// An undirected lattice edge, stored with its endpoints in sorted order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LatticeEdge {
    a: LatticePoint,
    b: LatticePoint,
}

impl LatticeEdge {
    /// `None` unless the two points are adjacent on the lattice.
    pub fn new(v: LatticePoint, w: LatticePoint) -> Option<LatticeEdge> {
        adjacent(v, w).then(|| LatticeEdge::sorted(v, w))
    }

    pub(crate) fn sorted(v: LatticePoint, w: LatticePoint) -> LatticeEdge {
        if v <= w {
            LatticeEdge { a: v, b: w }
        } else {
            LatticeEdge { a: w, b: v }
        }
    }

    pub fn endpoints(self) -> (LatticePoint, LatticePoint) {
        (self.a, self.b)
    }

    pub fn kind(self) -> EdgeKind {
        if kind_of(self.a) == Some(VertexKind::Center) || kind_of(self.b) == Some(VertexKind::Center) {
            EdgeKind::Long
        } else {
            EdgeKind::Short
        }
    }

    /// The black (midpoint) endpoint.
    pub fn black(self) -> LatticePoint {
        if kind_of(self.a) == Some(VertexKind::Midpoint) {
            self.a
        } else {
            self.b
        }
    }

    /// The white (center or corner) endpoint.
    pub fn white(self) -> LatticePoint {
        if kind_of(self.a) == Some(VertexKind::Midpoint) {
            self.b
        } else {
            self.a
        }
    }

    pub fn translate(self, by: LatticePoint) -> LatticeEdge {
        LatticeEdge::sorted(self.a + by, self.b + by)
    }

    pub fn contains(self, v: LatticePoint) -> bool {
        self.a == v || self.b == v
    }
}

impl fmt::Display for LatticeEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// A quadrilateral face of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Square {
    pub center: LatticePoint,
    pub orientation: Orientation,
    pub corner: LatticePoint,
    /// The two midpoints, counterclockwise: the boundary runs
    /// center, `midpoints[0]`, corner, `midpoints[1]`.
    pub midpoints: [LatticePoint; 2],
}

impl Square {
    /// Boundary vertices in counterclockwise order, starting at the center.
    pub fn vertices(&self) -> [LatticePoint; 4] {
        [self.center, self.midpoints[0], self.corner, self.midpoints[1]]
    }

    /// Boundary edges in counterclockwise order: long, short, short, long.
    pub fn edges(&self) -> [LatticeEdge; 4] {
        let v = self.vertices();
        [0, 1, 2, 3].map(|i| LatticeEdge::sorted(v[i], v[(i + 1) % 4]))
    }

    pub fn contains_vertex(&self, v: LatticePoint) -> bool {
        self.vertices().contains(&v)
    }

    /// Sum of the four vertices: four times the centroid, in lattice coordinates.
    pub fn centroid_x4(&self) -> LatticePoint {
        self.vertices().into_iter().fold(LatticePoint::ORIGIN, |s, v| s + v)
    }

    pub fn translate(&self, by: LatticePoint) -> Square {
        Square {
            center: self.center + by,
            orientation: self.orientation,
            corner: self.corner + by,
            midpoints: [self.midpoints[0] + by, self.midpoints[1] + by],
        }
    }
}

pub(crate) fn square_unchecked(center: LatticePoint, orientation: Orientation) -> Square {
    let [m0, m1] = orientation.midpoint_offsets();
    Square {
        center,
        orientation,
        corner: center + orientation.corner_offset(),
        midpoints: [center + m0, center + m1],
    }
}

/// The square of the given orientation inside the hexagon centered at `center`.
pub fn square_at(center: LatticePoint, orientation: Orientation) -> Result<Square> {
    if classify(center)? != VertexKind::Center {
        return Err(Error::NotACenter(center));
    }
    Ok(square_unchecked(center, orientation))
}

/// A square together with its tail, the third short edge at its corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Kite {
    pub square: Square,
    /// Far endpoint of the tail; always a midpoint.
    pub tail_end: LatticePoint,
}

impl Kite {
    pub fn orientation(&self) -> Orientation {
        self.square.orientation
    }

    /// The root vertex: the square's corner, where the tail attaches.
    pub fn root(&self) -> LatticePoint {
        self.square.corner
    }

    pub fn tail(&self) -> LatticeEdge {
        LatticeEdge::sorted(self.square.corner, self.tail_end)
    }

    /// The kite obtained by flipping this one across its pair's translation:
    /// opposite orientation, hexagon centered at the shifted tail end, tail
    /// ending at the shifted center.
    pub fn flipped(&self) -> Kite {
        let shift = self.orientation().pair().flip_shift();
        kite_of(square_unchecked(self.tail_end + shift, self.orientation().opposite()))
    }
}

pub fn kite_of(square: Square) -> Kite {
    let off = square.orientation.corner_offset();
    // The tail continues the center-to-corner direction by half its length.
    let tail_end = LatticePoint::new(square.center.p + 3 * off.p / 2, square.center.q + 3 * off.q / 2);
    Kite { square, tail_end }
}

/// The kite of the given pair that contains `edge` as a boundary edge or as
/// its tail. Every short edge lies on exactly one such kite; a long edge on at
/// most one.
pub fn kite_containing(edge: LatticeEdge, pair: OrientationPair) -> Option<Kite> {
    match edge.kind() {
        EdgeKind::Short => {
            let k = edge.white();
            pair.members().into_iter().find_map(|o| {
                let c = k - o.corner_offset();
                (kind_of(c) == Some(VertexKind::Center)).then(|| kite_of(square_unchecked(c, o)))
            })
        }
        EdgeKind::Long => {
            let (c, m) = (edge.white(), edge.black());
            pair.members().into_iter().find_map(|o| {
                let s = square_unchecked(c, o);
                s.midpoints.contains(&m).then(|| kite_of(s))
            })
        }
    }
}

/// All six squares containing `v` as a vertex, from the three to six hexagons around it.
pub fn squares_containing(v: LatticePoint) -> Vec<Square> {
    let mut out = Vec::new();
    match classify(v) {
        Ok(VertexKind::Center) => {
            out.extend(Orientation::ALL.iter().map(|&o| square_unchecked(v, o)));
        }
        Ok(VertexKind::Corner) => {
            for o in Orientation::ALL {
                let c = v - o.corner_offset();
                if kind_of(c) == Some(VertexKind::Center) {
                    out.push(square_unchecked(c, o));
                }
            }
        }
        Ok(VertexKind::Midpoint) => {
            for (d, kind) in neighbor_offsets(v) {
                if *kind == EdgeKind::Long {
                    let c = v + *d;
                    for o in Orientation::ALL {
                        let s = square_unchecked(c, o);
                        if s.midpoints.contains(&v) {
                            out.push(s);
                        }
                    }
                }
            }
        }
        Err(_) => {}
    }
    out.sort();
    out
}

/// The two squares on either side of a lattice edge.
pub fn squares_beside(edge: LatticeEdge) -> [Square; 2] {
    let mut found = squares_containing(edge.black()).into_iter().filter(|s| s.edges().contains(&edge));
    let first = found.next().expect("every lattice edge borders two squares");
    let second = found.next().expect("every lattice edge borders two squares");
    [first, second]
}

/// Whether a cell is a copy of the three-square diamond or of its mirror image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellParity {
    /// Squares {N, NW, SE}; cells sit on midpoints of class `(3,3)`.
    Standard,
    /// The mirror image {N, NE, SW}; cells sit on midpoints of class `(0,3)`.
    Reflected,
}

/// Whether the cell's square pointing along the N-S axis points north or south.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CellBase {
    N,
    S,
}

/// Grid position of a cell. Consecutive `i` are one hexagon apart along a
/// strip (due east); consecutive `j` are one strip apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellCoord {
    pub i: i32,
    pub j: i32,
}

/// Three squares sharing one midpoint, the cell's star.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub star: LatticePoint,
    pub parity: CellParity,
    pub base: CellBase,
    pub squares: [Square; 3],
}

impl CellParity {
    /// Star of the cell at `T(0,0)`.
    pub const fn origin(self) -> LatticePoint {
        match self {
            CellParity::Standard => pt(-3, 3),
            CellParity::Reflected => pt(0, 3),
        }
    }
}

/// Cell at grid position `coord`: `T(0,0)` of standard parity has star
/// `(-3,3)` and the reflected one `(0,3)`; `T(i,j)` is moved by `(6i, 6j)`.
pub fn cell(coord: CellCoord, parity: CellParity, base: CellBase) -> Cell {
    let star = parity.origin() + pt(6 * coord.i, 6 * coord.j);
    cell_at_star(star, parity, base)
}

pub(crate) fn cell_at_star(star: LatticePoint, parity: CellParity, base: CellBase) -> Cell {
    use Orientation::*;
    let (lo, hi, side, other) = match parity {
        CellParity::Standard => (star + pt(3, -3), star + pt(-3, 3), NW, SE),
        CellParity::Reflected => (star + pt(0, -3), star + pt(0, 3), NE, SW),
    };
    let squares = match base {
        CellBase::N => [square_unchecked(lo, N), square_unchecked(lo, side), square_unchecked(hi, other)],
        CellBase::S => [square_unchecked(hi, S), square_unchecked(hi, other), square_unchecked(lo, side)],
    };
    Cell { star, parity, base, squares }
}

/// Horizontal band of a square: squares of hexagon row `r` pointing north
/// (N, NE, NW) lie in band `r`, the others in band `r - 1`.
pub fn band_of(square: &Square) -> i32 {
    let row = square.center.q.div_euclid(6);
    match square.orientation {
        Orientation::N | Orientation::NE | Orientation::NW => row,
        Orientation::S | Orientation::SE | Orientation::SW => row - 1,
    }
}
