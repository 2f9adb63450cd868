//! Queries over a finished sweep: point classification, interior area and
//! rectilinear connectivity paths.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::ClosedPolyline;
use crate::engine::{invert_point, ExteriorSweep, SweepState};
use crate::frontier::Direction;
use crate::geom::Point2;
use crate::sweep::Trapezoid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("state has no trapezoids")]
    EmptyState,
    #[error("point ({0}, {1}) is not interior")]
    NotInterior(f64, f64),
    #[error("no path between interior points")]
    NoPath,
    #[error("row {row}: {message}")]
    Csv { row: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

/// Slab decomposition over a set of trapezoids with disjoint interiors.
///
/// Slab `i` is `[xs[i], xs[i + 1])`. Inside a slab the trapezoids crossing it
/// are stored bottom to top, so a query is two binary searches.
#[derive(Clone, Debug)]
pub struct SlabIndex {
    xs: Vec<f64>,
    slabs: Vec<Vec<u32>>,
    trapezoids: Vec<Trapezoid>,
    owners: Vec<usize>,
    by_owner: Vec<Vec<u32>>,
}

impl SlabIndex {
    pub fn new(trapezoids: Vec<Trapezoid>, owners: Vec<usize>) -> Result<Self, ClassifyError> {
        if trapezoids.is_empty() {
            return Err(ClassifyError::EmptyState);
        }
        let mut xs: Vec<f64> = trapezoids.iter().flat_map(|t| [t.x_left, t.x_right]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut slabs = vec![Vec::new(); xs.len() - 1];
        for (id, t) in trapezoids.iter().enumerate() {
            let i0 = xs.partition_point(|&x| x < t.x_left);
            let i1 = xs.partition_point(|&x| x < t.x_right);
            for slab in &mut slabs[i0..i1] {
                slab.push(id as u32);
            }
        }
        for (i, slab) in slabs.iter_mut().enumerate() {
            let xm = 0.5 * (xs[i] + xs[i + 1]);
            let mid = |id: &u32| {
                let t = &trapezoids[*id as usize];
                t.top.eval(xm) + t.bottom.eval(xm)
            };
            slab.sort_by(|a, b| mid(a).total_cmp(&mid(b)));
        }
        let mut by_owner = vec![Vec::new(); owners.iter().max().map_or(0, |m| m + 1)];
        for (id, &o) in owners.iter().enumerate() {
            by_owner[o].push(id as u32);
        }
        Ok(Self {
            xs,
            slabs,
            trapezoids,
            owners,
            by_owner,
        })
    }

    /// Index over every trapezoid of a run.
    pub fn build(state: &SweepState) -> Result<Self, ClassifyError> {
        let r = &state.region;
        Self::new(r.trapezoids().to_vec(), (0..r.len()).map(|i| r.owner(i)).collect())
    }

    pub fn slab_count(&self) -> usize {
        self.slabs.len()
    }

    pub fn slab_bounds(&self) -> &[f64] {
        &self.xs
    }

    pub fn trapezoid_count(&self) -> usize {
        self.trapezoids.len()
    }

    pub fn trapezoid(&self, id: usize) -> &Trapezoid {
        &self.trapezoids[id]
    }

    /// Sweep node that produced trapezoid `id`.
    pub fn owner(&self, id: usize) -> usize {
        self.owners[id]
    }

    /// Trapezoids produced by sweep node `node`.
    pub fn owned_by(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.by_owner.get(node).into_iter().flatten().map(|&i| i as usize)
    }

    /// Registrations summed over all slabs.
    pub fn registrations(&self) -> usize {
        self.slabs.iter().map(Vec::len).sum()
    }

    /// A trapezoid holding `q` strictly in y with clearance `margin`; the
    /// vertical sides count as closed. A negative margin inflates.
    pub fn find(&self, q: Point2, margin: f64) -> Option<usize> {
        let (first, last) = (self.xs[0], self.xs[self.xs.len() - 1]);
        if !(first <= q.x && q.x <= last) {
            return None;
        }
        let s = self.xs.partition_point(|&x| x <= q.x).saturating_sub(1).min(self.slabs.len() - 1);
        let hit = self.find_in_slab(s, q, margin);
        if hit.is_some() || s == 0 || q.x != self.xs[s] {
            return hit;
        }
        self.find_in_slab(s - 1, q, margin)
    }

    fn find_in_slab(&self, s: usize, q: Point2, margin: f64) -> Option<usize> {
        let slab = &self.slabs[s];
        let k = slab.partition_point(|&id| self.trapezoids[id as usize].top.eval(q.x) <= q.y);
        let inside = |id: u32| {
            let t = &self.trapezoids[id as usize];
            t.bottom.eval(q.x) + margin < q.y && q.y < t.top.eval(q.x) - margin
        };
        [k.wrapping_sub(1), k, k + 1]
            .into_iter()
            .filter_map(|i| slab.get(i).copied())
            .find(|&id| inside(id))
            .map(|id| id as usize)
    }

    /// Deepest vertical overlap between two trapezoids sharing a slab, or 0.
    ///
    /// Overlap depth is linear in x across a slab, so both slab ends are checked.
    pub fn max_overlap(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut spans: Vec<(f64, f64)> = Vec::new();
        for (s, slab) in self.slabs.iter().enumerate() {
            for x in [self.xs[s], self.xs[s + 1]] {
                spans.clear();
                spans.extend(slab.iter().map(|&id| {
                    let t = &self.trapezoids[id as usize];
                    (t.bottom.eval(x), t.top.eval(x))
                }));
                spans.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut reach = f64::NEG_INFINITY;
                for &(lo, hi) in &spans {
                    worst = worst.max(reach.min(hi) - lo);
                    reach = reach.max(hi);
                }
            }
        }
        worst
    }

    /// Same contract as [`find`](Self::find), by a scan over all trapezoids.
    pub fn find_linear(&self, q: Point2, margin: f64) -> Option<usize> {
        self.trapezoids.iter().position(|t| {
            t.x_left <= q.x
                && q.x <= t.x_right
                && t.bottom.eval(q.x) + margin < q.y
                && q.y < t.top.eval(q.x) - margin
        })
    }

    /// True when `q` and its horizontal neighbours at `±h` are all covered,
    /// so a seam between two trapezoids counts but an uncovered gap does not.
    fn covers(&self, q: Point2, h: f64) -> Option<usize> {
        let id = self.find(q, 0.0)?;
        let left = Point2::new(q.x - h, q.y);
        let right = Point2::new(q.x + h, q.y);
        (self.find(left, 0.0).is_some() && self.find(right, 0.0).is_some()).then_some(id)
    }
}

/// Exterior sweep with its index, in inverted coordinates.
#[derive(Clone, Debug)]
pub struct ExteriorIndex {
    pub center: Point2,
    pub image: ClosedPolyline,
    pub index: SlabIndex,
}

impl ExteriorIndex {
    pub fn new(ext: &ExteriorSweep) -> Result<Self, ClassifyError> {
        Ok(Self {
            center: ext.center,
            image: (*ext.image).clone(),
            index: SlabIndex::build(&ext.state)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Interior,
    Exterior,
    OnCurve,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Interior => "Interior",
            Verdict::Exterior => "Exterior",
            Verdict::OnCurve => "OnCurve",
            Verdict::Unknown => "Unknown",
        }
    }
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Distance to the curve is at most `ε_geom`.
    Distance,
    /// Inside the interior trapezoids.
    Sweep,
    /// Outside the curve's bounding box.
    BoundingBox,
    /// Inside the exterior sweep of the inverted curve.
    Inversion,
    /// Not covered by the interior sweep and no exterior sweep was given.
    Complement,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub distance_hint: f64,
    pub method: Method,
}

pub fn classify_point(
    index: &SlabIndex,
    curve: &ClosedPolyline,
    q: Point2,
    exterior: Option<&ExteriorIndex>,
) -> Classification {
    let eps = curve.eps();
    let d = curve.distance_to(q);
    let result = |verdict, distance_hint, method| Classification {
        verdict,
        distance_hint,
        method,
    };
    if d <= eps {
        return result(Verdict::OnCurve, d, Method::Distance);
    }
    if !curve.bbox().contains(q) {
        return result(Verdict::Exterior, d, Method::BoundingBox);
    }
    if index.covers(q, 0.5 * eps).is_some() {
        return result(Verdict::Interior, d, Method::Sweep);
    }
    if index.find(q, -eps).is_some() {
        return result(Verdict::Unknown, d, Method::Sweep);
    }
    match exterior {
        None => result(Verdict::Exterior, 0.0, Method::Complement),
        Some(ext) => {
            let w = invert_point(q, ext.center);
            let ie = ext.image.eps();
            if ext.index.covers(w, 0.5 * ie).is_some() {
                result(Verdict::Exterior, d, Method::Inversion)
            } else {
                result(Verdict::Unknown, d, Method::Inversion)
            }
        }
    }
}

/// Swept area, summed over nodes in id order.
pub fn interior_area(state: &SweepState) -> f64 {
    state
        .tree
        .iter()
        .flat_map(|n| n.sweep.trapezoids.iter())
        .map(Trapezoid::area)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectilinearPath {
    pub waypoints: Vec<Point2>,
}

impl RectilinearPath {
    fn push(&mut self, p: Point2) {
        if self.waypoints.last() != Some(&p) {
            self.waypoints.push(p);
        }
    }

    /// Drops interior waypoints that continue the previous move.
    fn simplify(&mut self) {
        let mut out: Vec<Point2> = Vec::with_capacity(self.waypoints.len());
        for &p in &self.waypoints {
            if out.len() >= 2 {
                let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
                if (a.x == b.x && b.x == p.x) || (a.y == b.y && b.y == p.y) {
                    out.pop();
                }
            }
            out.push(p);
        }
        self.waypoints = out;
    }

    pub fn turns(&self) -> usize {
        self.waypoints.len().saturating_sub(2)
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    pub fn is_axis_parallel(&self) -> bool {
        self.waypoints.windows(2).all(|w| w[0].x == w[1].x || w[0].y == w[1].y)
    }
}

/// An x inside trapezoid `t` whose column holds `[lo, hi]` with room to
/// spare: the clearance `min(lo - bottom, top - hi)` is maximised over the
/// slab, then the middle of the range with half that clearance is taken.
fn column_x(t: &Trapezoid, lo: f64, hi: f64) -> Option<f64> {
    let (a, b) = (t.x_left, t.x_right);
    let f1 = |x: f64| lo - t.bottom.eval(x);
    let f2 = |x: f64| t.top.eval(x) - hi;
    let (f1a, f1b, f2a, f2b) = (f1(a), f1(b), f2(a), f2(b));
    let g = |s: f64| (f1a + s * (f1b - f1a)).min(f2a + s * (f2b - f2a));
    let mut best = g(0.0).max(g(1.0));
    let (da, db) = (f1a - f2a, f1b - f2b);
    if da * db < 0.0 {
        best = best.max(g(da / (da - db)));
    }
    if !(best > 0.0) {
        return None;
    }
    let m = 0.5 * best;
    let (mut s0, mut s1) = (0.0f64, 1.0f64);
    for (fa, fb) in [(f1a, f1b), (f2a, f2b)] {
        if fa == fb {
            continue;
        }
        let r = (m - fa) / (fb - fa);
        if fb > fa {
            s0 = s0.max(r);
        } else {
            s1 = s1.min(r);
        }
    }
    let x = a + 0.5 * (s0 + s1) * (b - a);
    (s0 < s1 && a < x && x < b).then_some(x)
}

/// Extends `path`, which ends on node `n`'s segment line, across the site
/// that spawned `n` and onto its parent's segment line.
fn climb(state: &SweepState, index: &SlabIndex, n: usize, path: &mut RectilinearPath) -> Result<(), ClassifyError> {
    let node = &state.tree[n];
    let (site, parent) = match (node.site, node.parent) {
        (Some(s), Some(p)) => (s, p),
        _ => return Err(ClassifyError::NoPath),
    };
    let p = site.p;
    // the parent's trapezoids sit on the far side of the site from the new
    // segment; slivers left by nearly coincident breakpoints are stepped over
    let toward_right = site.direction == Direction::Left;
    let min_width = 1e3 * state.curve.eps();
    let mut side = p.x;
    let mut found = None;
    for _ in 0..32 {
        let next = index.owned_by(parent).map(|i| index.trapezoid(i)).find(|t| {
            let near = if toward_right { t.x_left } else { t.x_right };
            near == side && t.contains_closed_x(Point2::new(side, p.y), 0.0)
        });
        let Some(t) = next else { break };
        found = Some(t);
        if t.x_right - t.x_left > min_width {
            break;
        }
        side = if toward_right { t.x_right } else { t.x_left };
    }
    let t = found.ok_or(ClassifyError::NoPath)?;
    let y_par = state.tree[parent].t.y;
    let x = column_x(t, p.y.min(y_par), p.y.max(y_par)).ok_or(ClassifyError::NoPath)?;
    path.push(Point2::new(x, p.y));
    path.push(Point2::new(x, y_par));
    Ok(())
}

/// Axis-parallel path between two interior points, routed through the
/// sweep tree: up from each point's sweep to the common ancestor.
pub fn connectivity_path(
    state: &SweepState,
    index: &SlabIndex,
    q1: Point2,
    q2: Point2,
) -> Result<RectilinearPath, ClassifyError> {
    let curve = &state.curve;
    let locate = |q: Point2| {
        if classify_point(index, curve, q, None).verdict != Verdict::Interior {
            return Err(ClassifyError::NotInterior(q.x, q.y));
        }
        index.find(q, 0.0).ok_or(ClassifyError::NotInterior(q.x, q.y))
    };
    let (i1, i2) = (locate(q1)?, locate(q2)?);
    let (n1, n2) = (index.owner(i1), index.owner(i2));

    let a1 = state.ancestors(n1);
    let a2 = state.ancestors(n2);
    let lca = *a1.iter().find(|n| a2.contains(n)).ok_or(ClassifyError::NoPath)?;

    let leg = |q: Point2, i: usize, n: usize| -> Result<RectilinearPath, ClassifyError> {
        let mut path = RectilinearPath { waypoints: vec![q] };
        let t = index.trapezoid(i);
        let y_t = state.tree[n].t.y;
        let x = if t.x_left < q.x && q.x < t.x_right {
            q.x
        } else {
            column_x(t, q.y.min(y_t), q.y.max(y_t)).ok_or(ClassifyError::NoPath)?
        };
        path.push(Point2::new(x, q.y));
        path.push(Point2::new(x, y_t));
        let mut cur = n;
        while cur != lca {
            climb(state, index, cur, &mut path)?;
            cur = state.tree[cur].parent.ok_or(ClassifyError::NoPath)?;
        }
        Ok(path)
    };
    let mut path = leg(q1, i1, n1)?;
    let back = leg(q2, i2, n2)?;
    for &p in back.waypoints.iter().rev() {
        path.push(p);
    }
    path.simplify();
    Ok(path)
}

/// Reads `x,y` rows and writes `x,y,verdict,distance_hint` rows.
/// Returns the number of rows written.
pub fn classify_csv<R: Read, W: Write>(
    input: R,
    output: W,
    mut classify: impl FnMut(Point2) -> Classification,
) -> Result<usize, ClassifyError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(output);
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let bad = |message: String| ClassifyError::Csv { row, message };
        let record = record.map_err(|e| bad(e.to_string()))?;
        if record.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", record.len())));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("not a finite number: {s:?}")))
        };
        let q = Point2::new(num(&record[0])?, num(&record[1])?);
        let c = classify(q);
        writer
            .write_record([
                record[0].to_string(),
                record[1].to_string(),
                c.verdict.as_str().to_string(),
                format!("{:.12e}", c.distance_hint),
            ])
            .map_err(|e| ClassifyError::Io(e.to_string()))?;
        rows += 1;
    }
    writer.flush().map_err(|e| ClassifyError::Io(e.to_string()))?;
    Ok(rows)
}
