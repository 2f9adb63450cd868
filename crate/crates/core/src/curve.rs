//! Closed polylines, curve generators and axis-parallel line queries.
//!
//! A [`ClosedPolyline`] is immutable once built. Construction validates it
//! (vertex count, edge lengths, simplicity), reorients it counterclockwise and
//! builds a bucket grid over its edges; every query below goes through that grid.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{
    point_segment_distance, segment_distance, signed_area, Axis, BoundingBox, Point2,
    EPS_MIN_RELATIVE, EPS_RELATIVE,
};
use crate::edgetree::EdgeTree;
use crate::grid::UniformGrid;

/// Generators refuse to build polylines with more edges than this.
pub const DEFAULT_EDGE_CAP: usize = 1_000_000;

/// Step of the rotation scan in [`remove_degeneracy`].
pub const DEGENERACY_STEP: f64 = 1e-3;

/// Minimum angular clearance from vertical after [`remove_degeneracy`].
pub const DEGENERACY_CLEARANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("a closed curve needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("edge {0} has zero length")]
    DegenerateEdge(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("curve is not simple: edges {0} and {1} intersect")]
    NonSimpleCurve(usize, usize),
    #[error("level {level} needs {edges} edges, above the cap of {cap}")]
    LevelTooLarge { level: u32, edges: usize, cap: usize },
    #[error("invalid curve parameters: {0}")]
    InvalidSpec(String),
    #[error("cannot parse curve description: {0}")]
    Parse(String),
}

/// How a vertical (or horizontal) line meets the curve at one place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HitKind {
    /// The curve passes from one side of the line to the other.
    Crossing,
    /// The curve meets the line at a vertex and returns to the same side.
    Touch,
    /// An edge of the curve lies on the line.
    EdgeOverlap,
}

/// One connected piece of `line ∩ curve`; `low == high` for point hits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub y_low: f64,
    pub y_high: f64,
    pub kind: HitKind,
}

impl Hit {
    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.y_low - tol <= v && v <= self.y_high + tol
    }
}

/// `l_x ∩ J`, sorted by position along the line. For [`HorizontalHits`] the
/// `y_low`/`y_high` fields of each [`Hit`] hold x positions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerticalHits {
    pub x: f64,
    pub hits: Vec<Hit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorizontalHits {
    pub y: f64,
    pub hits: Vec<Hit>,
}

/// Curve description accepted by [`load_curve`] and the JSON reader.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CurveSpec {
    Polyline {
        vertices: Vec<[f64; 2]>,
    },
    Koch {
        level: u32,
    },
    Regular {
        n: usize,
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<CurveSpec, CurveError> {
        serde_json::from_str(text).map_err(|e| CurveError::Parse(e.to_string()))
    }
}

/// A simple closed polyline, counterclockwise, with an edge index.
///
/// Edge `i` runs from vertex `i` to vertex `i + 1 (mod n)`. Positions along the
/// curve are expressed as a parameter `s ∈ [0, n)`: edge index plus the
/// fraction travelled along that edge.
#[derive(Clone)]
pub struct ClosedPolyline {
    vertices: Vec<Point2>,
    simplicity_checked: bool,
    bbox: BoundingBox,
    eps: f64,
    grid: UniformGrid,
    walls: OnceLock<Walls>,
    edge_tree: OnceLock<EdgeTree>,
}

impl fmt::Debug for ClosedPolyline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedPolyline")
            .field("vertices", &self.vertices.len())
            .field("bbox", &self.bbox)
            .field("simplicity_checked", &self.simplicity_checked)
            .finish()
    }
}

impl ClosedPolyline {
    /// Validates and reorients `vertices` into a counterclockwise simple loop.
    pub fn new(vertices: Vec<Point2>) -> Result<Self, CurveError> {
        let mut vertices = vertices;
        let n = vertices.len();
        if n < 3 {
            return Err(CurveError::TooFewVertices(n));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(CurveError::NonFinite(i));
        }
        let bbox = BoundingBox::of_points(&vertices);
        let eps = EPS_RELATIVE * bbox.diagonal();
        for i in 0..n {
            if vertices[i].distance(vertices[(i + 1) % n]) <= eps {
                return Err(CurveError::DegenerateEdge(i));
            }
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let grid = build_edge_grid(&vertices, bbox);
        let curve = Self {
            vertices,
            simplicity_checked: true,
            bbox,
            eps,
            grid,
            walls: OnceLock::new(),
            edge_tree: OnceLock::new(),
        };
        if let Some((i, j)) = curve.find_self_intersection() {
            return Err(CurveError::NonSimpleCurve(i, j));
        }
        Ok(curve)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn simplicity_checked(&self) -> bool {
        self.simplicity_checked
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    /// The coincidence tolerance `ε_geom`.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Default minimum actionable frontier length.
    pub fn default_eps_min(&self) -> f64 {
        EPS_MIN_RELATIVE * self.bbox.diagonal()
    }

    #[inline]
    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).abs()
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                a.distance(b)
            })
            .sum()
    }

    pub fn centroid_of_vertices(&self) -> Point2 {
        let n = self.vertices.len() as f64;
        let (sx, sy) = self
            .vertices
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point2::new(sx / n, sy / n)
    }

    /// Curve parameter of point `p` on edge `e`.
    pub fn param_on_edge(&self, e: usize, p: Point2) -> f64 {
        let (a, b) = self.edge(e);
        let t = if (b.x - a.x).abs() >= (b.y - a.y).abs() {
            (p.x - a.x) / (b.x - a.x)
        } else {
            (p.y - a.y) / (b.y - a.y)
        };
        self.normalize_param(e as f64 + t.clamp(0.0, 1.0))
    }

    pub fn normalize_param(&self, s: f64) -> f64 {
        let n = self.len() as f64;
        let r = s.rem_euclid(n);
        if r >= n {
            0.0
        } else {
            r
        }
    }

    pub fn point_at_param(&self, s: f64) -> Point2 {
        let s = self.normalize_param(s);
        let e = (s.floor() as usize).min(self.len() - 1);
        let t = s - e as f64;
        let (a, b) = self.edge(e);
        Point2::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
    }

    /// Distance from `p` to the curve.
    pub fn distance_to(&self, p: Point2) -> f64 {
        self.nearest_edge(p).map_or(f64::INFINITY, |(_, d)| d)
    }

    /// Nearest edge and its distance.
    pub fn nearest_edge(&self, p: Point2) -> Option<(usize, f64)> {
        self.edge_tree
            .get_or_init(|| EdgeTree::new(&self.vertices))
            .nearest(&self.vertices, p)
    }

    /// Edges passing within `tol` of `p`.
    pub fn edges_near(&self, p: Point2, tol: f64) -> Vec<usize> {
        let g = &self.grid;
        let mut out = Vec::new();
        for iy in g.row(p.y - tol)..=g.row(p.y + tol) {
            for ix in g.col(p.x - tol)..=g.col(p.x + tol) {
                for &e in g.cell(ix, iy) {
                    let e = e as usize;
                    let (a, b) = self.edge(e);
                    if point_segment_distance(p, a, b) <= tol && !out.contains(&e) {
                        out.push(e);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Vertex nearest to `from` with `|v.y - y| <= tol` and `v.x` strictly
    /// between `from` and `to`, away from `to` by more than `tol`.
    pub(crate) fn vertex_near_row(&self, y: f64, from: f64, to: f64, tol: f64) -> Option<f64> {
        let g = &self.grid;
        let (lo, hi) = (from.min(to), from.max(to));
        let mut best: Option<f64> = None;
        for iy in g.row(y - tol)..=g.row(y + tol) {
            for ix in g.col(lo)..=g.col(hi) {
                for &e in g.cell(ix, iy) {
                    let v = self.vertices[e as usize];
                    if (v.y - y).abs() > tol || v.x <= lo || v.x >= hi || (v.x - to).abs() <= tol {
                        continue;
                    }
                    if best.is_none_or(|b| (v.x - from).abs() < (b - from).abs()) {
                        best = Some(v.x);
                    }
                }
            }
        }
        best
    }

    fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.len();
        let tol = self.eps;
        let g = &self.grid;
        let mut seen = vec![usize::MAX; n];
        for i in 0..n {
            let (a, b) = self.edge(i);
            let (x0, x1) = (a.x.min(b.x) - tol, a.x.max(b.x) + tol);
            let (y0, y1) = (a.y.min(b.y) - tol, a.y.max(b.y) + tol);
            let mut worst: Option<usize> = None;
            for iy in g.row(y0)..=g.row(y1) {
                for ix in g.col(x0)..=g.col(x1) {
                    for &j in g.cell(ix, iy) {
                        let j = j as usize;
                        if j <= i || seen[j] == i {
                            continue;
                        }
                        seen[j] = i;
                        let (c, d) = self.edge(j);
                        let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                        let bad = if adjacent {
                            let (far_i, far_j) = if j == i + 1 { (a, d) } else { (b, c) };
                            point_segment_distance(far_j, a, b) <= tol
                                || point_segment_distance(far_i, c, d) <= tol
                        } else {
                            segment_distance(a, b, c, d) <= tol
                        };
                        if bad && worst.is_none_or(|w| j < w) {
                            worst = Some(j);
                        }
                    }
                }
            }
            if let Some(j) = worst {
                return Some((i, j));
            }
        }
        None
    }

    /// Items of the grid column or row that a line `axis = c` runs through.
    fn line_candidates(&self, axis: Axis, c: f64) -> Box<dyn Iterator<Item = usize> + '_> {
        match axis {
            Axis::X => Box::new(self.grid.column_items(self.grid.col(c))),
            Axis::Y => Box::new(self.grid.row_items(self.grid.row(c))),
        }
    }

    pub(crate) fn line_hits(&self, axis: Axis, c: f64) -> Vec<Hit> {
        let n = self.len();
        let mut hits = Vec::new();
        let lo_bound = axis.along(self.bbox.min);
        let hi_bound = axis.along(self.bbox.max);
        if !(lo_bound <= c && c <= hi_bound) {
            return hits;
        }
        let mut on_line = Vec::new();
        for e in self.line_candidates(axis, c) {
            let (a, b) = self.edge(e);
            let (ua, ub) = (axis.along(a), axis.along(b));
            if ua == c && ub == c {
                let (va, vb) = (axis.across(a), axis.across(b));
                hits.push(Hit {
                    y_low: va.min(vb),
                    y_high: va.max(vb),
                    kind: HitKind::EdgeOverlap,
                });
            } else if (ua < c && c < ub) || (ub < c && c < ua) {
                let v = interpolate(axis, a, b, c);
                hits.push(Hit {
                    y_low: v,
                    y_high: v,
                    kind: HitKind::Crossing,
                });
            } else {
                if ua == c {
                    on_line.push(e);
                }
                if ub == c {
                    on_line.push((e + 1) % n);
                }
            }
        }
        on_line.sort_unstable();
        on_line.dedup();
        for i in on_line {
            let prev = axis.along(self.vertices[(i + n - 1) % n]) - c;
            let next = axis.along(self.vertices[(i + 1) % n]) - c;
            if prev == 0.0 || next == 0.0 {
                // end of an on-line edge, already covered by its overlap
                continue;
            }
            let v = axis.across(self.vertices[i]);
            let kind = if (prev < 0.0) != (next < 0.0) {
                HitKind::Crossing
            } else {
                HitKind::Touch
            };
            hits.push(Hit {
                y_low: v,
                y_high: v,
                kind,
            });
        }
        hits.sort_by(|a, b| a.y_low.total_cmp(&b.y_low));
        let mut merged: Vec<Hit> = Vec::with_capacity(hits.len());
        for h in hits {
            if let Some(last) = merged.last_mut() {
                if h.y_low <= last.y_high + self.eps {
                    last.y_high = last.y_high.max(h.y_high);
                    if h.kind == HitKind::EdgeOverlap || last.y_high > last.y_low {
                        last.kind = HitKind::EdgeOverlap;
                    }
                    continue;
                }
            }
            merged.push(h);
        }
        merged
    }

    /// Nearest curve point on the line `axis = c` strictly beyond `from`,
    /// walking in the increasing (`forward`) or decreasing direction. Edges
    /// for which `skip` returns true are ignored.
    pub(crate) fn shoot(
        &self,
        axis: Axis,
        c: f64,
        from: f64,
        forward: bool,
        skip: impl Fn(usize) -> bool,
    ) -> Option<(f64, usize)> {
        let g = &self.grid;
        let lo_bound = axis.along(self.bbox.min);
        let hi_bound = axis.along(self.bbox.max);
        if !(lo_bound <= c && c <= hi_bound) {
            return None;
        }
        let (line_cell, start, count) = match axis {
            Axis::X => (g.col(c), g.row(from), g.ny()),
            Axis::Y => (g.row(c), g.col(from), g.nx()),
        };
        let mut best: Option<(f64, usize)> = None;
        let mut k = start as isize;
        while k >= 0 && (k as usize) < count {
            let cell = match axis {
                Axis::X => g.cell(line_cell, k as usize),
                Axis::Y => g.cell(k as usize, line_cell),
            };
            for &e in cell {
                let e = e as usize;
                if skip(e) {
                    continue;
                }
                let (a, b) = self.edge(e);
                let (ua, ub) = (axis.along(a), axis.along(b));
                if ua.min(ub) > c || ua.max(ub) < c {
                    continue;
                }
                let (va, vb) = (axis.across(a), axis.across(b));
                let v = if ua == c && ub == c {
                    if forward {
                        let lo = va.min(vb);
                        if lo > from {
                            lo
                        } else {
                            continue;
                        }
                    } else {
                        let hi = va.max(vb);
                        if hi < from {
                            hi
                        } else {
                            continue;
                        }
                    }
                } else if ua == c {
                    va
                } else if ub == c {
                    vb
                } else {
                    interpolate(axis, a, b, c)
                };
                let beyond = if forward { v > from } else { v < from };
                if beyond && best.is_none_or(|(bv, _)| if forward { v < bv } else { v > bv }) {
                    best = Some((v, e));
                }
            }
            if let Some((bv, _)) = best {
                let (cw, ch) = g.cell_size();
                let (edge_lo, size) = match axis {
                    Axis::X => (g.row_bottom(k as usize), ch),
                    Axis::Y => (g.col_left(k as usize), cw),
                };
                let done = if forward {
                    bv < edge_lo + size
                } else {
                    bv >= edge_lo
                };
                if done {
                    break;
                }
            }
            k += if forward { 1 } else { -1 };
        }
        best
    }

    /// Vertical edges lying on the line `x = c`, as `(edge, y_low, y_high)`.
    pub(crate) fn vertical_edges_at(&self, c: f64) -> Vec<(usize, f64, f64)> {
        if !(self.bbox.min.x <= c && c <= self.bbox.max.x) {
            return Vec::new();
        }
        let mut out: Vec<(usize, f64, f64)> = self
            .line_candidates(Axis::X, c)
            .filter_map(|e| {
                let (a, b) = self.edge(e);
                (a.x == c && b.x == c).then(|| (e, a.y.min(b.y), a.y.max(b.y)))
            })
            .collect();
        out.sort_by(|a, b| a.1.total_cmp(&b.1));
        out
    }

    pub(crate) fn walls(&self) -> &Walls {
        self.walls.get_or_init(|| Walls::build(self))
    }
}

#[inline]
fn interpolate(axis: Axis, a: Point2, b: Point2, c: f64) -> f64 {
    // anchor at the endpoint with the smaller along-coordinate so the value
    // does not depend on edge direction
    let (p, q) = if axis.along(a) <= axis.along(b) {
        (a, b)
    } else {
        (b, a)
    };
    let (up, uq) = (axis.along(p), axis.along(q));
    axis.across(p) + (c - up) * (axis.across(q) - axis.across(p)) / (uq - up)
}

fn build_edge_grid(vertices: &[Point2], bbox: BoundingBox) -> UniformGrid {
    let n = vertices.len();
    let mut grid = UniformGrid::for_items(bbox, n);
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        grid.insert(a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y));
    }
    grid
}

/// Free vertical visibility of every vertex: the longest vertical segment
/// through the vertex whose interior misses the curve.
#[derive(Clone, Debug)]
pub(crate) struct Walls {
    walls: Vec<Wall>,
    grid: UniformGrid,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Wall {
    pub x: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Walls {
    fn build(curve: &ClosedPolyline) -> Walls {
        let n = curve.len();
        let bbox = curve.bbox;
        let mut grid = UniformGrid::for_items(bbox, n);
        let mut walls = Vec::with_capacity(n);
        for i in 0..n {
            let v = curve.vertices[i];
            let prev_edge = (i + n - 1) % n;
            let prev = curve.vertices[prev_edge];
            let next = curve.vertices[(i + 1) % n];
            let skip = |e: usize| e == i || e == prev_edge;
            let up_blocked = (prev.x == v.x && prev.y > v.y) || (next.x == v.x && next.y > v.y);
            let down_blocked =
                (prev.x == v.x && prev.y < v.y) || (next.x == v.x && next.y < v.y);
            let hi = if up_blocked {
                v.y
            } else {
                curve
                    .shoot(Axis::X, v.x, v.y, true, skip)
                    .map_or(f64::INFINITY, |(y, _)| y)
            };
            let lo = if down_blocked {
                v.y
            } else {
                curve
                    .shoot(Axis::X, v.x, v.y, false, skip)
                    .map_or(f64::NEG_INFINITY, |(y, _)| y)
            };
            grid.insert(
                v.x,
                v.x,
                lo.max(bbox.min.y),
                hi.min(bbox.max.y),
            );
            walls.push(Wall { x: v.x, lo, hi });
        }
        Walls { walls, grid }
    }

    /// x positions in `(a, b)` of vertices whose free vertical visibility
    /// strictly contains height `y`; sorted and deduplicated.
    pub(crate) fn stabbing(&self, y: f64, a: f64, b: f64) -> Vec<f64> {
        let g = &self.grid;
        let iy = g.row(y);
        let mut xs = Vec::new();
        for ix in g.col(a)..=g.col(b) {
            for &w in g.cell(ix, iy) {
                let w = self.walls[w as usize];
                if a < w.x && w.x < b && w.lo < y && y < w.hi {
                    xs.push(w.x);
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    #[cfg(test)]
    pub(crate) fn all(&self) -> &[Wall] {
        &self.walls
    }
}

/// `l_x ∩ J` with vertex coincidences coalesced and vertical edges reported as
/// [`HitKind::EdgeOverlap`] intervals.
pub fn vertical_line_hits(curve: &ClosedPolyline, x: f64) -> VerticalHits {
    VerticalHits {
        x,
        hits: curve.line_hits(Axis::X, x),
    }
}

/// Horizontal counterpart of [`vertical_line_hits`]; hit intervals are in x.
pub fn horizontal_line_hits(curve: &ClosedPolyline, y: f64) -> HorizontalHits {
    HorizontalHits {
        y,
        hits: curve.line_hits(Axis::Y, y),
    }
}

/// Builds and validates the curve a [`CurveSpec`] describes.
pub fn load_curve(spec: &CurveSpec) -> Result<ClosedPolyline, CurveError> {
    match spec {
        CurveSpec::Polyline { vertices } => {
            ClosedPolyline::new(vertices.iter().map(|&v| Point2::from(v)).collect())
        }
        CurveSpec::Koch { level } => koch_generate(*level, unit_triangle()),
        CurveSpec::Regular { n, radius, center } => {
            regular_ngon(*n, *radius, Point2::from(*center))
        }
    }
}

/// Side-1 equilateral triangle with its base on the x axis, counterclockwise.
pub fn unit_triangle() -> [Point2; 3] {
    [
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(0.5, 3f64.sqrt() / 2.0),
    ]
}

pub fn regular_ngon(n: usize, radius: f64, center: Point2) -> Result<ClosedPolyline, CurveError> {
    if n < 3 {
        return Err(CurveError::TooFewVertices(n));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(CurveError::InvalidSpec(format!("radius must be positive, got {radius}")));
    }
    let vertices = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            Point2::new(center.x + radius * a.cos(), center.y + radius * a.sin())
        })
        .collect();
    ClosedPolyline::new(vertices)
}

/// Outward snowflake construction on `base`, capped at [`DEFAULT_EDGE_CAP`] edges.
pub fn koch_generate(level: u32, base: [Point2; 3]) -> Result<ClosedPolyline, CurveError> {
    koch_generate_capped(level, base, DEFAULT_EDGE_CAP)
}

pub fn koch_generate_capped(
    level: u32,
    base: [Point2; 3],
    cap: usize,
) -> Result<ClosedPolyline, CurveError> {
    let edges = 3usize.saturating_mul(4usize.checked_pow(level).unwrap_or(usize::MAX));
    if edges > cap {
        return Err(CurveError::LevelTooLarge { level, edges, cap });
    }
    let mut pts = base.to_vec();
    if signed_area(&pts) < 0.0 {
        pts.reverse();
    }
    if signed_area(&pts).abs() <= EPS_RELATIVE * BoundingBox::of_points(&pts).diagonal().powi(2) {
        return Err(CurveError::InvalidSpec("base triangle is degenerate".into()));
    }
    // for a counterclockwise loop the exterior is to the right of each edge
    let (s, c) = (-std::f64::consts::FRAC_PI_3).sin_cos();
    for _ in 0..level {
        let n = pts.len();
        let mut next = Vec::with_capacity(4 * n);
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            let d = Point2::new((b.x - a.x) / 3.0, (b.y - a.y) / 3.0);
            let p1 = Point2::new(a.x + d.x, a.y + d.y);
            let p3 = Point2::new(a.x + 2.0 * d.x, a.y + 2.0 * d.y);
            let peak = Point2::new(p1.x + c * d.x - s * d.y, p1.y + s * d.x + c * d.y);
            next.extend_from_slice(&[a, p1, peak, p3]);
        }
        pts = next;
    }
    ClosedPolyline::new(pts)
}

/// Angular distance of an edge direction from vertical, in `[0, π/2]`.
pub fn angle_from_vertical(a: Point2, b: Point2) -> f64 {
    let phi = (b.y - a.y).atan2(b.x - a.x);
    let r = (phi - std::f64::consts::FRAC_PI_2).rem_euclid(std::f64::consts::PI);
    r.min(std::f64::consts::PI - r)
}

/// Rotates the curve counterclockwise about the origin by the smallest
/// `θ ∈ {0, δ, 2δ, …}` that leaves every edge at least
/// [`DEGENERACY_CLEARANCE`] radians away from vertical.
pub fn remove_degeneracy(curve: &ClosedPolyline) -> (ClosedPolyline, f64) {
    let dirs: Vec<f64> = (0..curve.len())
        .map(|i| {
            let (a, b) = curve.edge(i);
            (b.y - a.y).atan2(b.x - a.x)
        })
        .collect();
    let clear = |theta: f64| {
        dirs.iter().all(|phi| {
            let r = (phi + theta - std::f64::consts::FRAC_PI_2).rem_euclid(std::f64::consts::PI);
            r.min(std::f64::consts::PI - r) >= DEGENERACY_CLEARANCE
        })
    };
    let k = (0u64..)
        .find(|&k| clear(k as f64 * DEGENERACY_STEP))
        .expect("finitely many edge directions");
    let theta = k as f64 * DEGENERACY_STEP;
    if k == 0 {
        return (curve.clone(), 0.0);
    }
    let rotated = curve.vertices.iter().map(|p| p.rotated(theta)).collect();
    let out = ClosedPolyline::new(rotated).expect("rotation preserves simplicity");
    (out, theta)
}
