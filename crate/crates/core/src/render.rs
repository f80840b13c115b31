//! SVG drawings of diamonds, matchings and height functions.

use std::fmt::Write;

use crate::diamond::Diamond;
use crate::error::{Error, Result};
use crate::height::HeightFunction;
use crate::lattice::{classify, EdgeKind, LatticeEdge, LatticePoint, Orientation, VertexKind};
use crate::matching::Matching;
use crate::shuffle::active_kites;
use crate::Coord;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Show {
    pub graph: bool,
    pub matching: bool,
    pub heights: bool,
    pub kite_ovals: bool,
}

impl Default for Show {
    fn default() -> Show {
        Show { graph: true, matching: true, heights: false, kite_ovals: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    /// Pixels per unit length (one long edge).
    pub scale: Coord,
    pub show: Show,
    /// Colors for N, NE, SE, S, SW, NW.
    pub palette: [String; 6],
}

impl Default for RenderOptions {
    fn default() -> RenderOptions {
        RenderOptions {
            scale: 40.0,
            show: Show::default(),
            palette: ["#d62728", "#ff7f0e", "#bcbd22", "#2ca02c", "#1f77b4", "#9467bd"].map(String::from),
        }
    }
}

impl RenderOptions {
    fn color(&self, o: Orientation) -> &str {
        &self.palette[o as usize]
    }
}

/// Class of a matched edge for coloring: a long edge pointing from its center
/// at angle θ gets the orientation at θ + 30°, a short edge the orientation
/// pointing from its midpoint to its corner.
pub fn edge_class(e: LatticeEdge) -> Orientation {
    let (from, to) = (e.black(), e.white());
    let (dir, turn) = match e.kind() {
        EdgeKind::Long => (from - to, 30.0),
        EdgeKind::Short => (to - from, 0.0),
    };
    let (x, y) = dir.to_cartesian::<Coord>();
    let angle = (y.atan2(x).to_degrees() + turn).rem_euclid(360.0);
    *Orientation::ALL
        .iter()
        .min_by(|a, b| {
            let da = circular_gap(angle, f64::from(a.angle_degrees()));
            let db = circular_gap(angle, f64::from(b.angle_degrees()));
            da.total_cmp(&db)
        })
        .expect("six orientations")
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

fn height_color(t: f64) -> String {
    // dark blue through teal to pale yellow
    let stops = [(0.0, [31.0, 38.0, 94.0]), (0.5, [33.0, 145.0, 140.0]), (1.0, [253.0, 231.0, 37.0])];
    let t = t.clamp(0.0, 1.0);
    let (lo, hi) = if t <= 0.5 { (stops[0], stops[1]) } else { (stops[1], stops[2]) };
    let u = (t - lo.0) / (hi.0 - lo.0);
    let c: Vec<u8> = (0..3).map(|i| (lo.1[i] + u * (hi.1[i] - lo.1[i])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

struct Frame {
    min_x: Coord,
    max_y: Coord,
    scale: Coord,
    margin: Coord,
}

impl Frame {
    fn at(&self, v: LatticePoint) -> (Coord, Coord) {
        let (x, y) = v.to_cartesian::<Coord>();
        (self.margin + (x - self.min_x) * self.scale, self.margin + (self.max_y - y) * self.scale)
    }
}

/// Draws `d`, optionally with a matching and a height function.
pub fn to_svg(d: &Diamond, m: Option<&Matching>, h: Option<&HeightFunction>, opts: &RenderOptions) -> Result<String> {
    if !(opts.scale > 0.0 && opts.scale.is_finite()) {
        return Err(Error::Domain(format!("scale must be positive, got {}", opts.scale)));
    }
    if let Some(m) = m {
        m.check_diamond(d)?;
    }
    if let Some(h) = h {
        if h.order() != d.order() || h.values().len() != d.squares().len() {
            return Err(Error::DiamondMismatch { expected: d.order(), found: h.order() });
        }
    }
    let kites = if opts.show.kite_ovals { active_kites(d) } else { Vec::new() };
    let mut points: Vec<LatticePoint> = d.vertices().to_vec();
    points.extend(kites.iter().flat_map(|k| [k.square.center, k.tail_end]));
    let xy: Vec<(Coord, Coord)> = points.iter().map(|v| v.to_cartesian::<Coord>()).collect();
    let fold = |f: fn(Coord, Coord) -> Coord, init: Coord, pick: fn(&(Coord, Coord)) -> Coord| {
        xy.iter().map(pick).fold(init, f)
    };
    let (min_x, max_x) = (fold(Coord::min, Coord::INFINITY, |p| p.0), fold(Coord::max, Coord::NEG_INFINITY, |p| p.0));
    let (min_y, max_y) = (fold(Coord::min, Coord::INFINITY, |p| p.1), fold(Coord::max, Coord::NEG_INFINITY, |p| p.1));
    let (min_x, max_x, min_y, max_y) =
        if xy.is_empty() { (0.0, 0.0, 0.0, 0.0) } else { (min_x, max_x, min_y, max_y) };
    let margin = opts.scale * 0.5;
    let frame = Frame { min_x, max_y, scale: opts.scale, margin };
    let width = (max_x - min_x) * opts.scale + 2.0 * margin;
    let height = (max_y - min_y) * opts.scale + 2.0 * margin;

    let mut s = String::new();
    let w = &mut s;
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
    )
    .unwrap();
    writeln!(w, "<title>D_{}</title>", d.order()).unwrap();
    writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();

    let heights = h.filter(|_| opts.show.heights);
    if heights.is_some() || opts.show.graph {
        let range = heights.map(|h| {
            let lo = h.values().iter().copied().min().unwrap_or(0);
            let hi = h.values().iter().copied().max().unwrap_or(0);
            (lo, hi)
        });
        writeln!(w, r#"<g id="faces" stroke="none">"#).unwrap();
        for (f, sq) in d.squares().iter().enumerate() {
            let pts: Vec<String> = sq
                .vertices()
                .iter()
                .map(|&v| {
                    let (x, y) = frame.at(v);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let fill = match (heights, range) {
                (Some(h), Some((lo, hi))) => {
                    let t = if hi > lo { (h.at(f as u32) - lo) as f64 / (hi - lo) as f64 } else { 0.5 };
                    format!(r#"fill="{}""#, height_color(t))
                }
                _ => format!(r#"fill="{}" fill-opacity="0.18""#, opts.color(sq.orientation)),
            };
            writeln!(w, r#"<polygon points="{}" {fill}/>"#, pts.join(" ")).unwrap();
        }
        writeln!(w, "</g>").unwrap();
    }

    let line = |w: &mut String, e: LatticeEdge, attrs: &str| {
        let (a, b) = e.endpoints();
        let (x1, y1) = frame.at(a);
        let (x2, y2) = frame.at(b);
        writeln!(w, r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"{attrs}/>"#).unwrap();
    };
    if opts.show.graph {
        let sw = (opts.scale * 0.03).max(0.2);
        writeln!(w, r##"<g id="graph" stroke="#777777" stroke-width="{sw:.3}">"##).unwrap();
        for id in 0..d.edges().len() as u32 {
            line(w, d.lattice_edge(id), "");
        }
        writeln!(w, "</g>").unwrap();
    }
    if let Some(m) = m.filter(|_| opts.show.matching) {
        let sw = opts.scale * 0.22;
        writeln!(w, r#"<g id="matching" stroke-width="{sw:.3}" stroke-linecap="round">"#).unwrap();
        for id in m.edge_ids() {
            let e = d.lattice_edge(id);
            line(w, e, &format!(r#" stroke="{}""#, opts.color(edge_class(e))));
        }
        writeln!(w, "</g>").unwrap();
    }
    if opts.show.graph && d.vertices().len() <= 5000 {
        let r = opts.scale * 0.07;
        writeln!(w, r##"<g id="vertices" stroke="#000000" stroke-width="{:.3}">"##, r * 0.4).unwrap();
        for &v in d.vertices() {
            let (x, y) = frame.at(v);
            let fill = if classify(v)? == VertexKind::Midpoint { "#000000" } else { "#ffffff" };
            writeln!(w, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="{fill}"/>"#).unwrap();
        }
        writeln!(w, "</g>").unwrap();
    }
    if !kites.is_empty() {
        writeln!(w, r##"<g id="kites" fill="none" stroke="#444444" stroke-width="{:.3}">"##, opts.scale * 0.03).unwrap();
        for k in &kites {
            let (x1, y1) = frame.at(k.square.center);
            let (x2, y2) = frame.at(k.tail_end);
            let (cx, cy) = ((x1 + x2) / 2.0, (y1 + y2) / 2.0);
            let rx = ((x2 - x1).hypot(y2 - y1)) / 2.0 * 1.1;
            let ry = opts.scale * 0.55;
            let angle = (y2 - y1).atan2(x2 - x1).to_degrees();
            writeln!(
                w,
                r#"<ellipse cx="{cx:.3}" cy="{cy:.3}" rx="{rx:.3}" ry="{ry:.3}" transform="rotate({angle:.3} {cx:.3} {cy:.3})"/>"#
            )
            .unwrap();
        }
        writeln!(w, "</g>").unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diamond::build_diamond;
    use crate::enumerate::list_matchings;
    use crate::order::Order;

    #[test]
    fn edge_classes_cover_all_orientations() {
        use std::collections::HashSet;
        let d = build_diamond(Order::integer(2)).unwrap();
        let classes: HashSet<_> = (0..d.edges().len() as u32).map(|e| edge_class(d.lattice_edge(e))).collect();
        assert_eq!(classes.len(), 6);
    }

    #[test]
    fn half_order_matchings_draw_differently() {
        let d = build_diamond(Order::from_halves(1)).unwrap();
        let ms = list_matchings(&d).unwrap();
        let opts = RenderOptions::default();
        let a = to_svg(&d, Some(&ms[0]), None, &opts).unwrap();
        let b = to_svg(&d, Some(&ms[1]), None, &opts).unwrap();
        assert_ne!(a, b);
        assert_eq!(a.matches("<circle").count(), 4);
        assert_eq!(a, to_svg(&d, Some(&ms[0]), None, &opts).unwrap());
    }

    #[test]
    fn rejects_foreign_matching_and_bad_scale() {
        let d1 = build_diamond(Order::integer(1)).unwrap();
        let d2 = build_diamond(Order::integer(2)).unwrap();
        let m = &list_matchings(&d2).unwrap()[0];
        assert!(to_svg(&d1, Some(m), None, &RenderOptions::default()).is_err());
        let opts = RenderOptions { scale: 0.0, ..RenderOptions::default() };
        assert!(to_svg(&d1, None, None, &opts).is_err());
    }
}
