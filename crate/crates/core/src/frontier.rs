//! The piecewise-vertical boundary of the swept region and its extension.
//!
//! The boundary is a set of directed loops stored as an arena of linked
//! nodes, with the swept region on the left of every element. Vertical
//! elements off the curve are the frontier; each is indexed by x.
//!
//! Extending by a new sweep inserts the sweep's loop and then cancels every
//! pair of coincident, oppositely directed verticals: such a pair is a wall
//! between two swept regions. The consumed segment `s_p` is the overlap of
//! the chosen vertical with the new sweep's near-end vertical.

use std::collections::BTreeMap;

use ordered_float::OrderedFloat;
use rstar::primitives::{GeomWithData, Rectangle};
use rstar::{RTree, RTreeObject};
use serde::Serialize;
use thiserror::Error;

use crate::curve::ClosedPolyline;
use crate::geom::{Axis, Point2};
use crate::region::SweptRegion;
use crate::segment::{clip_grazing, EndpointKind, HorizontalFreeSegment};
use crate::sweep::{BoundaryElement, ElementKind, HorizontalSweep};

/// Identifier of a frontier vertical; stale once the vertical is consumed or split.
pub type SegmentId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrontierError {
    #[error("segment {id} has length {length}, not above the minimum")]
    SegmentTooShort { id: SegmentId, length: f64 },
    #[error("no room to extend from segment {0}")]
    NoRoom(SegmentId),
    #[error("splice mismatch: {0}")]
    SpliceMismatch(String),
    #[error("extension segment enters the swept region or the curve at ({0}, {1})")]
    InvalidExtension(f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtensionSite {
    pub segment_id: SegmentId,
    pub p: Point2,
    pub direction: Direction,
}

/// A live frontier vertical.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontierVertical {
    pub id: SegmentId,
    pub kind: ElementKind,
    pub x: f64,
    pub y_low: f64,
    pub y_high: f64,
    pub upward: bool,
    pub generator: usize,
}

impl FrontierVertical {
    pub fn length(&self) -> f64 {
        self.y_high - self.y_low
    }

    /// Side of the line on which unswept space lies.
    pub fn exposed(&self) -> Direction {
        if self.upward {
            Direction::Right
        } else {
            Direction::Left
        }
    }
}

/// Boundary element tagged with the sweep node that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TaggedElement {
    #[serde(flatten)]
    pub element: BoundaryElement,
    pub generator: usize,
}

#[derive(Clone, Debug)]
struct Node {
    elem: BoundaryElement,
    generator: usize,
    prev: usize,
    next: usize,
    alive: bool,
}

/// Outcome of a successful splice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpliceReport {
    /// The consumed `s_p` as `(y_low, y_high)` at the site's x.
    pub consumed: (f64, f64),
    /// Frontier verticals created by this splice that are still live.
    pub new_segments: Vec<SegmentId>,
    /// Verticals that existed before and were consumed or split.
    pub removed: Vec<SegmentId>,
}

#[derive(Clone, Debug)]
pub struct FrontierBoundary {
    nodes: Vec<Node>,
    index: BTreeMap<OrderedFloat<f64>, Vec<usize>>,
    eps: f64,
    /// Old nodes relinked by the last splice.
    touched: Vec<usize>,
    /// Nodes killed by the last splice.
    killed: Vec<usize>,
}

impl FrontierBoundary {
    /// Single-loop boundary of an initial sweep.
    pub fn from_sweep(sweep: &HorizontalSweep, node: usize, eps: f64) -> Self {
        Self::from_elements(&sweep.boundary.elements, node, eps)
    }

    /// Boundary made of one loop of the given elements.
    pub fn from_elements(elements: &[BoundaryElement], generator: usize, eps: f64) -> Self {
        let mut f = Self {
            nodes: Vec::new(),
            index: BTreeMap::new(),
            eps,
            touched: Vec::new(),
            killed: Vec::new(),
        };
        f.insert_loop(elements, generator);
        f
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn insert_loop(&mut self, elements: &[BoundaryElement], generator: usize) -> Vec<usize> {
        let base = self.nodes.len();
        let n = elements.len();
        let mut verticals = Vec::new();
        for (i, e) in elements.iter().enumerate() {
            self.nodes.push(Node {
                elem: *e,
                generator,
                prev: base + (i + n - 1) % n,
                next: base + (i + 1) % n,
                alive: true,
            });
            if e.is_vertical() {
                self.index_add(base + i);
                verticals.push(base + i);
            }
        }
        verticals
    }

    fn index_add(&mut self, id: usize) {
        let x = self.nodes[id].elem.from.x;
        self.index.entry(OrderedFloat(x)).or_default().push(id);
    }

    fn index_remove(&mut self, id: usize) {
        let x = OrderedFloat(self.nodes[id].elem.from.x);
        if let Some(v) = self.index.get_mut(&x) {
            v.retain(|&i| i != id);
            if v.is_empty() {
                self.index.remove(&x);
            }
        }
    }

    fn push_node(&mut self, elem: BoundaryElement, generator: usize) -> usize {
        self.nodes.push(Node {
            elem,
            generator,
            prev: usize::MAX,
            next: usize::MAX,
            alive: true,
        });
        let id = self.nodes.len() - 1;
        if elem.is_vertical() {
            self.index_add(id);
        }
        id
    }

    fn kill(&mut self, id: usize) {
        self.killed.push(id);
        self.nodes[id].alive = false;
        if self.nodes[id].elem.is_vertical() {
            self.index_remove(id);
        }
    }

    fn link(&mut self, a: usize, piece: Option<usize>, d: usize) {
        self.touched.extend([a, d]);
        match piece {
            Some(m) => {
                self.nodes[a].next = m;
                self.nodes[m].prev = a;
                self.nodes[m].next = d;
                self.nodes[d].prev = m;
            }
            None => {
                self.nodes[a].next = d;
                self.nodes[d].prev = a;
            }
        }
    }

    pub fn vertical(&self, id: SegmentId) -> Option<FrontierVertical> {
        let node = self.nodes.get(id)?;
        if !node.alive || !node.elem.is_vertical() {
            return None;
        }
        let (x, y_low, y_high) = node.elem.vertical_span();
        Some(FrontierVertical {
            id,
            kind: node.elem.kind,
            x,
            y_low,
            y_high,
            upward: node.elem.is_upward(),
            generator: node.generator,
        })
    }

    /// Live frontier verticals ordered by x.
    pub fn verticals(&self) -> impl Iterator<Item = FrontierVertical> + '_ {
        self.index
            .values()
            .flat_map(|ids| ids.iter())
            .filter_map(|&id| self.vertical(id))
    }

    pub fn vertical_count(&self) -> usize {
        self.index.values().map(Vec::len).sum()
    }

    /// Live verticals longer than `min_len`.
    pub fn actionable_count(&self, min_len: f64) -> usize {
        self.verticals().filter(|v| v.length() > min_len).count()
    }

    /// The boundary as a list of loops, each in traversal order.
    pub fn loops(&self) -> Vec<Vec<TaggedElement>> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for start in 0..self.nodes.len() {
            if !self.nodes[start].alive || seen[start] {
                continue;
            }
            let mut lp = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                lp.push(TaggedElement {
                    element: self.nodes[i].elem,
                    generator: self.nodes[i].generator,
                });
                i = self.nodes[i].next;
            }
            out.push(lp);
        }
        out
    }

    pub fn element_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    /// Boundary dump: loops of `{kind, from, to, edge, generator}` records.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.loops()).expect("boundary serializes")
    }

    /// First live vertical crossed by the horizontal ray from `(x0, y)`
    /// before reaching `limit`, excluding verticals at `x0` itself.
    pub(crate) fn first_crossing(&self, y: f64, x0: f64, dir: Direction, limit: f64) -> Option<f64> {
        let eps = self.eps;
        let blocks = |ids: &Vec<usize>| {
            ids.iter().any(|&id| {
                let (_, lo, hi) = self.nodes[id].elem.vertical_span();
                lo + eps < y && y < hi - eps
            })
        };
        match dir {
            Direction::Right => {
                if limit <= x0 + eps {
                    return None;
                }
                self.index
                    .range(OrderedFloat(x0 + eps)..OrderedFloat(limit))
                    .find(|(_, ids)| blocks(ids))
                    .map(|(x, _)| x.0)
            }
            Direction::Left => {
                if limit >= x0 - eps {
                    return None;
                }
                self.index
                    .range(OrderedFloat(limit)..OrderedFloat(x0 - eps))
                    .rev()
                    .find(|(x, ids)| x.0 > limit && blocks(ids))
                    .map(|(x, _)| x.0)
            }
        }
    }

    fn partner(&self, id: usize) -> Option<usize> {
        let eps = self.eps;
        let (x, lo, hi) = self.nodes[id].elem.vertical_span();
        let up = self.nodes[id].elem.is_upward();
        self.index
            .range(OrderedFloat(x - eps)..=OrderedFloat(x + eps))
            .flat_map(|(_, ids)| ids.iter().copied())
            .find(|&j| {
                if j == id {
                    return false;
                }
                let e = &self.nodes[j].elem;
                let (_, l2, h2) = e.vertical_span();
                e.is_upward() != up && hi.min(h2) - lo.max(l2) > eps
            })
    }

    /// Removes the overlap of two opposite coincident verticals and relinks
    /// the loops around it. Returns the surviving vertical pieces.
    fn cancel(&mut self, a: usize, b: usize) -> Vec<usize> {
        let eps = self.eps;
        let (pid, qid) = if self.nodes[a].elem.is_upward() { (a, b) } else { (b, a) };
        let (p, q) = (self.nodes[pid].clone(), self.nodes[qid].clone());
        let (_, p1, p2) = p.elem.vertical_span();
        let (_, q1, q2) = q.elem.vertical_span();
        let (lo, hi) = (p1.max(q1), p2.min(q2));
        self.kill(pid);
        self.kill(qid);
        let piece = |f: &mut Self, node: &Node, y0: f64, y1: f64| {
            let elem = BoundaryElement {
                kind: node.elem.kind,
                from: Point2::new(node.elem.from.x, y0),
                to: Point2::new(node.elem.from.x, y1),
                edge: None,
            };
            f.push_node(elem, node.generator)
        };
        let low = if lo - p1 > eps {
            Some(piece(self, &p, p1, lo))
        } else if lo - q1 > eps {
            Some(piece(self, &q, lo, q1))
        } else {
            None
        };
        let high = if p2 - hi > eps {
            Some(piece(self, &p, hi, p2))
        } else if q2 - hi > eps {
            Some(piece(self, &q, q2, hi))
        } else {
            None
        };
        // prev(P) -> low -> next(Q), prev(Q) -> high -> next(P)
        if p.prev != qid {
            self.link(p.prev, low, q.next);
        }
        if q.prev != pid {
            self.link(q.prev, high, p.next);
        }
        low.into_iter().chain(high).collect()
    }

    /// Extends the boundary by `sweep`, built over a segment starting at `site.p`.
    pub fn splice(
        &mut self,
        site: &ExtensionSite,
        sweep: &HorizontalSweep,
        node: usize,
    ) -> Result<SpliceReport, FrontierError> {
        let eps = self.eps;
        let v = self.vertical(site.segment_id).ok_or_else(|| {
            FrontierError::SpliceMismatch(format!("segment {} is not on the frontier", site.segment_id))
        })?;
        let near = sweep
            .boundary
            .elements
            .iter()
            .filter(|e| e.is_vertical() && (e.from.x - v.x).abs() <= eps && e.is_upward() != v.upward)
            .map(|e| e.vertical_span())
            .find(|&(_, lo, hi)| lo < site.p.y && site.p.y < hi)
            .ok_or_else(|| {
                FrontierError::SpliceMismatch(format!(
                    "new sweep has no near-end vertical through ({}, {})",
                    site.p.x, site.p.y
                ))
            })?;
        let consumed = (near.1.max(v.y_low), near.2.min(v.y_high));
        if consumed.1 - consumed.0 <= eps {
            return Err(FrontierError::SpliceMismatch("shared segment is empty".into()));
        }

        self.touched.clear();
        self.killed.clear();
        let first_new = self.nodes.len();
        let mut work = self.insert_loop(&sweep.boundary.elements, node);
        let mut removed = Vec::new();
        while let Some(id) = work.pop() {
            if !self.nodes[id].alive {
                continue;
            }
            if let Some(j) = self.partner(id) {
                for k in [id, j] {
                    if k < first_new {
                        removed.push(k);
                    }
                }
                work.extend(self.cancel(id, j));
            }
        }
        if self.nodes[site.segment_id].alive {
            return Err(FrontierError::SpliceMismatch(format!(
                "segment {} survived the splice",
                site.segment_id
            )));
        }
        let new_segments = (first_new..self.nodes.len())
            .filter(|&i| self.nodes[i].alive && self.nodes[i].elem.is_vertical())
            .collect();
        Ok(SpliceReport {
            consumed,
            new_segments,
            removed,
        })
    }
}

/// Extension site at the midpoint of frontier vertical `id`.
pub fn select_extension_site(
    frontier: &FrontierBoundary,
    id: SegmentId,
    eps_min: f64,
) -> Result<ExtensionSite, FrontierError> {
    let v = frontier
        .vertical(id)
        .ok_or(FrontierError::SegmentTooShort { id, length: 0.0 })?;
    if v.length() <= eps_min {
        return Err(FrontierError::SegmentTooShort {
            id,
            length: v.length(),
        });
    }
    Ok(ExtensionSite {
        segment_id: id,
        p: Point2::new(v.x, 0.5 * (v.y_low + v.y_high)),
        direction: v.exposed(),
    })
}

/// An extension segment no longer than this many `ε_geom` is refused.
pub const NO_ROOM_FACTOR: f64 = 10.0;

/// Number of points sampled along a proposed extension segment.
pub const EXTENSION_SAMPLES: usize = 100;

/// Greedy extension segment from `site.p` into unswept space.
///
/// `cap` in `(0, 1]` shortens the segment to that fraction of the available
/// room; the end then lies in free space.
pub fn propose_extension_segment(
    curve: &ClosedPolyline,
    frontier: &FrontierBoundary,
    swept: &SweptRegion,
    site: &ExtensionSite,
    cap: Option<f64>,
) -> Result<HorizontalFreeSegment, FrontierError> {
    let eps = curve.eps();
    let p = site.p;
    let forward = site.direction == Direction::Right;
    let hit = curve.shoot(Axis::Y, p.y, p.x, forward, |_| false);
    let (mut end, mut kind) = match hit {
        Some((x, _)) => (x, EndpointKind::OnCurve),
        None => (
            if forward { f64::INFINITY } else { f64::NEG_INFINITY },
            EndpointKind::Infinite,
        ),
    };
    if let Some(x) = frontier.first_crossing(p.y, p.x, site.direction, end) {
        end = x;
        kind = EndpointKind::Free;
    }
    if !end.is_finite() {
        return Err(FrontierError::NoRoom(site.segment_id));
    }
    (end, kind) = clip_grazing(curve, p.y, p.x, (end, kind));
    if let Some(c) = cap {
        end = p.x + c * (end - p.x);
        kind = EndpointKind::Free;
    }
    if (end - p.x).abs() <= NO_ROOM_FACTOR * eps {
        return Err(FrontierError::NoRoom(site.segment_id));
    }
    // the ray already stops at J, so only the swept region needs sampling
    for k in 0..EXTENSION_SAMPLES {
        let s = (k as f64 + 0.5) / EXTENSION_SAMPLES as f64;
        let q = Point2::new(p.x + s * (end - p.x), p.y);
        if swept.locate_closed(q, 0.0).is_some() {
            return Err(FrontierError::InvalidExtension(q.x, q.y));
        }
    }
    Ok(if forward {
        HorizontalFreeSegment {
            y: p.y,
            x_left: p.x,
            x_right: end,
            left_kind: EndpointKind::Free,
            right_kind: kind,
        }
    } else {
        HorizontalFreeSegment {
            y: p.y,
            x_left: end,
            x_right: p.x,
            left_kind: kind,
            right_kind: EndpointKind::Free,
        }
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundaryDiagnostics {
    pub closure_gap: f64,
    pub self_intersections: usize,
    pub clearance_violations: usize,
    pub loops: usize,
    pub elements: usize,
}

impl BoundaryDiagnostics {
    pub fn pass(&self, eps: f64) -> bool {
        self.closure_gap <= eps && self.self_intersections == 0 && self.clearance_violations == 0
    }
}

fn touches_interior(p: Point2, a: Point2, b: Point2, tol: f64) -> bool {
    crate::geom::point_segment_distance(p, a, b) <= tol && p.distance(a) > tol && p.distance(b) > tol
}

fn elements_conflict(e: &BoundaryElement, f: &BoundaryElement, tol: f64) -> bool {
    use crate::geom::orient;
    let (a, b, c, d) = (e.from, e.to, f.from, f.to);
    // signed distances, so collinear pieces of one edge don't cross by rounding
    let side = |p: Point2, q: Point2, r: Point2| {
        let s = orient(p, q, r) / p.distance(q);
        if s > tol {
            1
        } else if s < -tol {
            -1
        } else {
            0
        }
    };
    let proper = side(a, b, c) * side(a, b, d) < 0 && side(c, d, a) * side(c, d, b) < 0;
    // endpoints meeting endpoints is allowed: the region may pinch at a curve point
    proper
        || touches_interior(a, c, d, tol)
        || touches_interior(b, c, d, tol)
        || touches_interior(c, a, b, tol)
        || touches_interior(d, a, b, tol)
}

/// Numeric Jordan-ness check of the boundary.
pub fn validate_boundary(curve: &ClosedPolyline, k: &FrontierBoundary) -> BoundaryDiagnostics {
    let eps = k.eps;
    let ids: Vec<usize> = (0..k.nodes.len()).filter(|&i| k.nodes[i].alive).collect();
    let mut diag = BoundaryDiagnostics {
        elements: ids.len(),
        loops: k.loops().len(),
        ..Default::default()
    };
    for &i in &ids {
        let n = &k.nodes[i];
        let gap = n.elem.to.distance(k.nodes[n.next].elem.from);
        diag.closure_gap = diag.closure_gap.max(gap);
    }

    let tree = RTree::bulk_load(ids.iter().map(|&i| entry(k, i)).collect());
    for &i in &ids {
        let n = &k.nodes[i];
        for other in tree.locate_in_envelope_intersecting(entry(k, i).geom().envelope()) {
            let j = other.data;
            if j <= i || n.next == j || n.prev == j {
                continue;
            }
            if elements_conflict(&n.elem, &k.nodes[j].elem, eps) {
                diag.self_intersections += 1;
            }
        }
    }

    for v in k.verticals() {
        if let Some((y, _)) = curve.shoot(Axis::X, v.x, v.y_low + eps, true, |_| false) {
            if y < v.y_high - eps {
                diag.clearance_violations += 1;
            }
        }
    }
    diag
}

type Entry = GeomWithData<Rectangle<[f64; 2]>, usize>;

fn entry(k: &FrontierBoundary, id: usize) -> Entry {
    let (e, eps) = (&k.nodes[id].elem, k.eps);
    let rect = Rectangle::from_corners(
        [e.from.x.min(e.to.x) - eps, e.from.y.min(e.to.y) - eps],
        [e.from.x.max(e.to.x) + eps, e.from.y.max(e.to.y) + eps],
    );
    GeomWithData::new(rect, id)
}

/// Boundary check that only revisits what each splice changed.
///
/// Nodes are immutable once pushed, and a splice only relinks an old node
/// after killing its old neighbour, so pairs of old nodes never need a
/// second look. Each call checks nodes added since the last call against
/// everything alive, and the closure of every relinked node. The first
/// call is a full check. Call it after every splice.
#[derive(Clone, Debug, Default)]
pub struct BoundaryValidator {
    tree: RTree<Entry>,
    indexed: usize,
    mark: Vec<u32>,
    pass: u32,
}

impl BoundaryValidator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Diagnostics for the part of `k` changed since the previous call.
    /// `loops` is left at zero.
    pub fn check(&mut self, curve: &ClosedPolyline, k: &FrontierBoundary) -> BoundaryDiagnostics {
        let eps = k.eps;
        let start = self.indexed;
        let fresh: Vec<usize> = (start..k.nodes.len()).filter(|&i| k.nodes[i].alive).collect();
        if start == 0 {
            self.tree = RTree::bulk_load(fresh.iter().map(|&i| entry(k, i)).collect());
        } else {
            for &i in k.killed.iter().filter(|&&i| i < start) {
                self.tree.remove(&entry(k, i));
            }
            for &i in &fresh {
                self.tree.insert(entry(k, i));
            }
        }
        self.indexed = k.nodes.len();
        self.mark.resize(k.nodes.len(), 0);
        self.pass += 1;
        let pass = self.pass;

        let mut diag = BoundaryDiagnostics {
            elements: fresh.len(),
            ..Default::default()
        };
        let touched = if start == 0 { &[][..] } else { &k.touched[..] };
        for &i in touched.iter().filter(|&&i| k.nodes[i].alive) {
            let n = &k.nodes[i];
            let gap = n
                .elem
                .to
                .distance(k.nodes[n.next].elem.from)
                .max(k.nodes[n.prev].elem.to.distance(n.elem.from));
            diag.closure_gap = diag.closure_gap.max(gap);
        }

        // pairs among new nodes are counted once, from the later one
        for &i in &fresh {
            self.mark[i] = pass;
        }
        for &i in &fresh {
            let n = &k.nodes[i];
            let gap = n.elem.to.distance(k.nodes[n.next].elem.from);
            diag.closure_gap = diag.closure_gap.max(gap);

            let area = entry(k, i).geom().envelope();
            for other in self.tree.locate_in_envelope_intersecting(area) {
                let j = other.data;
                if j == i || !k.nodes[j].alive || (self.mark[j] == pass && j < i) {
                    continue;
                }
                if n.next == j || n.prev == j {
                    continue;
                }
                if elements_conflict(&n.elem, &k.nodes[j].elem, eps) {
                    diag.self_intersections += 1;
                }
            }

            if n.elem.is_vertical() {
                let (x, lo, hi) = n.elem.vertical_span();
                if let Some((y, _)) = curve.shoot(Axis::X, x, lo + eps, true, |_| false) {
                    if y < hi - eps {
                        diag.clearance_violations += 1;
                    }
                }
            }
        }
        diag
    }
}
