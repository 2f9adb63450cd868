//! The sweepline driver.
//!
//! A run starts with one horizontal sweep through a root point, then keeps
//! extending the swept region from frontier verticals until none longer than
//! `eps_min` is left. Every sweep is a node of a tree whose parent is the
//! sweep that produced the consumed vertical.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ordered_float::OrderedFloat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{vertical_line_hits, ClosedPolyline, CurveError};
use crate::frontier::{
    propose_extension_segment, select_extension_site, BoundaryDiagnostics, BoundaryValidator,
    ExtensionSite, FrontierBoundary, FrontierError, SegmentId,
};
use crate::geom::{BoundingBox, Point2, EPS_RELATIVE};
use crate::region::SweptRegion;
use crate::segment::{clear_horizontal_segment_at, open_segment_at, EndpointKind, HorizontalFreeSegment, OpenSegment, SegmentError};
use crate::sweep::{build_sweep, HorizontalSweep, SweepError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("work queue is empty")]
    QueueEmpty,
    #[error("no room to extend from segment {0}")]
    NoRoom(SegmentId),
    #[error("no root point found")]
    RootNotFound,
    #[error("state is not maximal")]
    NotMaximal,
    #[error("inversion center is on the curve")]
    CenterOnCurve,
    #[error("inverted curve is not simple: {0}")]
    NonSimpleImage(CurveError),
    #[error("boundary check failed after step {step}: {diagnostics:?}")]
    InvalidBoundary {
        step: usize,
        diagnostics: BoundaryDiagnostics,
    },
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Frontier(#[from] FrontierError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Order in which frontier verticals are taken from the work queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Fifo,
    Lifo,
    #[serde(rename = "largest")]
    LargestFirst,
    /// Smallest x first. Only meant for adversarial tests together with
    /// [`EnginePolicy::extension_cap`].
    Leftmost,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Fifo => "fifo",
            Order::Lifo => "lifo",
            Order::LargestFirst => "largest",
            Order::Leftmost => "leftmost",
        })
    }
}

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fifo" => Ok(Order::Fifo),
            "lifo" => Ok(Order::Lifo),
            "largest" => Ok(Order::LargestFirst),
            "leftmost" => Ok(Order::Leftmost),
            _ => Err(format!("unknown policy '{s}', expected fifo, lifo or largest")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnginePolicy {
    pub order: Order,
    /// Minimum actionable frontier length; `None` means `1e-7 ×` bbox diagonal.
    pub eps_min: Option<f64>,
    pub max_steps: usize,
    pub ray_guard_window: usize,
    /// Shortens every extension (and the right half of the initial segment)
    /// to this fraction of the available room. Test hook for non-terminating
    /// chains; leave `None` in normal use.
    pub extension_cap: Option<f64>,
    /// Validate the boundary after every splice (incrementally, see
    /// [`BoundaryValidator`]) and fail on the first violation.
    pub check_boundary: bool,
}

impl Default for EnginePolicy {
    fn default() -> Self {
        Self {
            order: Order::LargestFirst,
            eps_min: None,
            max_steps: 1_000_000,
            ray_guard_window: 64,
            extension_cap: None,
            check_boundary: false,
        }
    }
}

impl EnginePolicy {
    pub fn with_order(order: Order) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepNode {
    pub id: usize,
    pub t: HorizontalFreeSegment,
    pub sweep: HorizontalSweep,
    /// `None` for the initial sweep, whose parent is the virtual root.
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub consumed_segment: Option<SegmentId>,
    pub site: Option<ExtensionSite>,
    /// `s_p` as `(y_low, y_high)` at the site's x.
    pub consumed: Option<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RunStatus {
    Running,
    Maximal,
    StepLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RayVerdict {
    Terminating,
    NonTerminatingSuspected,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayDiagnostic {
    /// Node ids from the oldest inspected ancestor down to the newest node.
    pub chain: Vec<usize>,
    /// `(x, y_low, y_high)` of the estimated limiting vertical.
    pub limiting_segment_estimate: (f64, f64, f64),
    pub verdict: RayVerdict,
    pub at_step: usize,
}

/// Trailing chain length the ray guard inspects.
pub const RAY_GUARD_TAIL: usize = 8;

/// Relative scale of the ray guard: a tail is suspect when its sites drift
/// less than this fraction of the consumed length and its total gain is below
/// the same fraction of the squared length.
pub const RAY_GUARD_RATIO: f64 = 1e-3;

#[derive(Clone, Debug, Default)]
struct WorkQueue {
    order: Option<Order>,
    list: VecDeque<SegmentId>,
    heap: BinaryHeap<(OrderedFloat<f64>, Reverse<SegmentId>)>,
    urgent: Vec<SegmentId>,
}

impl WorkQueue {
    fn new(order: Order) -> Self {
        Self {
            order: Some(order),
            ..Self::default()
        }
    }

    fn push(&mut self, id: SegmentId, x: f64, length: f64) {
        match self.order.expect("queue order") {
            Order::Fifo | Order::Lifo => self.list.push_back(id),
            Order::LargestFirst => self.heap.push((OrderedFloat(length), Reverse(id))),
            Order::Leftmost => self.heap.push((OrderedFloat(-x), Reverse(id))),
        }
    }

    /// Next id and whether it was queued for an uncapped remediation sweep.
    fn pop(&mut self) -> Option<(SegmentId, bool)> {
        if let Some(id) = self.urgent.pop() {
            return Some((id, true));
        }
        match self.order.expect("queue order") {
            Order::Fifo => self.list.pop_front(),
            Order::Lifo => self.list.pop_back(),
            Order::LargestFirst | Order::Leftmost => self.heap.pop().map(|(_, Reverse(id))| id),
        }
        .map(|id| (id, false))
    }

    fn len(&self) -> usize {
        self.list.len() + self.heap.len() + self.urgent.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RootMethod {
    Lemma,
    CentroidFallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootPoint {
    pub p: Point2,
    pub segment: OpenSegment,
    pub method: RootMethod,
}

/// A running or finished sweepline algorithm.
#[derive(Clone, Debug)]
pub struct SweepState {
    pub curve: Arc<ClosedPolyline>,
    pub policy: EnginePolicy,
    pub eps_min: f64,
    pub tree: Vec<SweepNode>,
    pub frontier: FrontierBoundary,
    pub region: SweptRegion,
    pub total_area: f64,
    pub step_count: usize,
    pub area_history: Vec<f64>,
    pub status: RunStatus,
    pub ray_diagnostics: Vec<RayDiagnostic>,
    /// Frontier verticals dropped without a sweep (too short or no room).
    pub retired: usize,
    /// Boundary validations run so far when `check_boundary` is on.
    pub boundary_checks: usize,
    validator: Option<BoundaryValidator>,
    queue: WorkQueue,
    guard_mark: usize,
}

/// Outcome of one successful [`step`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepReport {
    pub node: usize,
    pub parent: usize,
    pub segment: SegmentId,
    pub area: f64,
}

impl SweepState {
    /// State after the initial sweep through `p_star`.
    pub fn start(curve: &ClosedPolyline, p_star: Point2, policy: &EnginePolicy) -> Result<Self, EngineError> {
        let curve = Arc::new(curve.clone());
        let eps_min = policy.eps_min.unwrap_or_else(|| curve.default_eps_min());
        let mut t = clear_horizontal_segment_at(&curve, p_star)?;
        if let Some(cap) = policy.extension_cap {
            t.x_right = p_star.x + cap * (t.x_right - p_star.x);
            t.right_kind = EndpointKind::Free;
        }
        let sweep = build_sweep(&curve, &t)?;
        let frontier = FrontierBoundary::from_sweep(&sweep, 0, curve.eps());
        let mut region = SweptRegion::new();
        for trap in &sweep.trapezoids {
            region.insert(*trap, 0);
        }
        let mut state = SweepState {
            eps_min,
            policy: policy.clone(),
            total_area: sweep.area,
            step_count: 1,
            area_history: vec![sweep.area],
            tree: vec![SweepNode {
                id: 0,
                t,
                sweep,
                parent: None,
                children: Vec::new(),
                consumed_segment: None,
                site: None,
                consumed: None,
            }],
            frontier,
            region,
            status: RunStatus::Running,
            ray_diagnostics: Vec::new(),
            retired: 0,
            boundary_checks: 0,
            validator: None,
            queue: WorkQueue::new(policy.order),
            guard_mark: 0,
            curve,
        };
        let ids: Vec<_> = state.frontier.verticals().map(|v| v.id).collect();
        state.enqueue(&ids);
        state.check_boundary()?;
        Ok(state)
    }

    fn enqueue(&mut self, ids: &[SegmentId]) {
        for &id in ids {
            match self.frontier.vertical(id) {
                Some(v) if v.length() > self.eps_min => self.queue.push(id, v.x, v.length()),
                _ => self.retired += 1,
            }
        }
    }

    fn check_boundary(&mut self) -> Result<(), EngineError> {
        if !self.policy.check_boundary {
            return Ok(());
        }
        let curve = &self.curve;
        let d = self
            .validator
            .get_or_insert_with(BoundaryValidator::new)
            .check(curve, &self.frontier);
        self.boundary_checks += 1;
        if d.pass(self.curve.eps()) {
            Ok(())
        } else {
            Err(EngineError::InvalidBoundary {
                step: self.step_count,
                diagnostics: d,
            })
        }
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Live frontier verticals longer than `eps_min`.
    pub fn frontier_remaining(&self) -> usize {
        self.frontier.actionable_count(self.eps_min)
    }

    pub fn is_maximal(&self) -> bool {
        self.status == RunStatus::Maximal
    }

    /// Node ids from `node` up to the initial sweep.
    pub fn ancestors(&self, node: usize) -> Vec<usize> {
        let mut out = vec![node];
        let mut cur = node;
        while let Some(p) = self.tree[cur].parent {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn report(&self) -> Report {
        Report {
            steps: self.step_count,
            total_area: self.total_area,
            frontier_remaining: self.frontier_remaining(),
            area_history: self.area_history.clone(),
            policy: self.policy.order.to_string(),
            eps_min: self.eps_min,
            ray_diagnostics: self.ray_diagnostics.clone(),
            status: self.status,
        }
    }

    fn ray_guard_step(&mut self, newest: usize) {
        if let Some(d) = ray_guard_chain(self, newest) {
            self.guard_mark = newest;
            // remediate: sweep uncapped from the newest verticals of the chain
            let ids: Vec<_> = self
                .frontier
                .verticals()
                .filter(|v| v.generator == newest && v.length() > self.eps_min)
                .map(|v| v.id)
                .collect();
            self.queue.urgent.extend(ids);
            self.ray_diagnostics.push(d);
        }
    }
}

/// Report written by the command-line `sweep` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub steps: usize,
    pub total_area: f64,
    pub frontier_remaining: usize,
    pub area_history: Vec<f64>,
    pub policy: String,
    pub eps_min: f64,
    pub ray_diagnostics: Vec<RayDiagnostic>,
    pub status: RunStatus,
}

/// Applies one extension.
///
/// Stale and too-short queue entries are skipped silently. A vertical with no
/// room in front of it is retired and reported as [`EngineError::NoRoom`]; the
/// state stays valid.
pub fn step(state: &mut SweepState) -> Result<StepReport, EngineError> {
    loop {
        let (id, urgent) = state.queue.pop().ok_or(EngineError::QueueEmpty)?;
        let Some(v) = state.frontier.vertical(id) else {
            continue;
        };
        if v.length() <= state.eps_min {
            state.retired += 1;
            continue;
        }
        let site = select_extension_site(&state.frontier, id, state.eps_min)?;
        let cap = if urgent { None } else { state.policy.extension_cap };
        let t = match propose_extension_segment(
            &state.curve,
            &state.frontier,
            &state.region,
            &site,
            cap,
        ) {
            Ok(t) => t,
            Err(FrontierError::NoRoom(id)) => {
                state.retired += 1;
                return Err(EngineError::NoRoom(id));
            }
            Err(e) => return Err(e.into()),
        };
        let sweep = build_sweep(&state.curve, &t)?;
        let node = state.tree.len();
        let report = state.frontier.splice(&site, &sweep, node)?;
        for trap in &sweep.trapezoids {
            state.region.insert(*trap, node);
        }
        let area = sweep.area;
        state.total_area += area;
        state.area_history.push(state.total_area);
        state.step_count += 1;
        let parent = v.generator;
        state.tree[parent].children.push(node);
        state.tree.push(SweepNode {
            id: node,
            t,
            sweep,
            parent: Some(parent),
            children: Vec::new(),
            consumed_segment: Some(id),
            site: Some(site),
            consumed: Some(report.consumed),
        });
        state.enqueue(&report.new_segments);
        state.check_boundary()?;
        state.ray_guard_step(node);
        return Ok(StepReport {
            node,
            parent,
            segment: id,
            area,
        });
    }
}

/// Runs `state` until it is maximal or the step cap is reached.
pub fn drive(state: &mut SweepState) -> Result<(), EngineError> {
    drive_with(state, |_, _| {})
}

/// [`drive`] with a callback after every applied extension.
pub fn drive_with<F>(state: &mut SweepState, mut on_step: F) -> Result<(), EngineError>
where
    F: FnMut(&SweepState, &StepReport),
{
    while state.step_count < state.policy.max_steps {
        match step(state) {
            Ok(r) => on_step(state, &r),
            Err(EngineError::NoRoom(_)) => {}
            Err(EngineError::QueueEmpty) => {
                state.status = RunStatus::Maximal;
                return Ok(());
            }
            Err(e) => return Err(e),
        }
    }
    state.status = if state.queue.len() == 0 || state.frontier_remaining() == 0 {
        RunStatus::Maximal
    } else {
        RunStatus::StepLimit
    };
    Ok(())
}

/// Full run from `p_star`. A run stopped by `max_steps` comes back with
/// [`RunStatus::StepLimit`].
pub fn run_sweep(curve: &ClosedPolyline, p_star: Point2, policy: &EnginePolicy) -> Result<SweepState, EngineError> {
    let mut state = SweepState::start(curve, p_star, policy)?;
    drive(&mut state)?;
    Ok(state)
}

fn ray_guard_chain(state: &SweepState, newest: usize) -> Option<RayDiagnostic> {
    let window = state.policy.ray_guard_window.max(2);
    let tail = RAY_GUARD_TAIL.min(window);
    let mut chain = Vec::with_capacity(tail);
    let mut cur = Some(newest);
    while let Some(n) = cur {
        if chain.len() == tail || state.tree[n].site.is_none() || n <= state.guard_mark {
            break;
        }
        chain.push(n);
        cur = state.tree[n].parent;
    }
    if chain.len() < tail {
        return None;
    }
    chain.reverse();
    let eps_min = state.eps_min;
    let gains: f64 = chain.iter().map(|&n| state.tree[n].sweep.area).sum();
    let xs = chain.iter().map(|&n| state.tree[n].site.unwrap().p.x);
    let (xmin, xmax) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let lengths: Vec<f64> = chain
        .iter()
        .map(|&n| {
            let (lo, hi) = state.tree[n].consumed.unwrap();
            hi - lo
        })
        .collect();
    let steady = lengths.iter().all(|&l| l > eps_min) && lengths[tail - 1] >= 0.5 * lengths[0];
    let scale = lengths[0];
    if gains < RAY_GUARD_RATIO * scale * scale && xmax - xmin < RAY_GUARD_RATIO * scale && steady {
        let last = &state.tree[newest];
        let (lo, hi) = last.consumed.unwrap();
        let x_lim = match last.site.unwrap().direction {
            crate::frontier::Direction::Right => last.t.x_right,
            crate::frontier::Direction::Left => last.t.x_left,
        };
        Some(RayDiagnostic {
            chain,
            limiting_segment_estimate: (x_lim, lo, hi),
            verdict: RayVerdict::NonTerminatingSuspected,
            at_step: state.step_count,
        })
    } else {
        None
    }
}

/// Chains currently suspected of not terminating.
pub fn ray_guard(state: &SweepState) -> Vec<RayDiagnostic> {
    let newest = state.tree.len() - 1;
    ray_guard_chain(state, newest).into_iter().collect()
}

/// Which of the two arcs between the extreme vertices a curve point lies on.
fn arc_of(curve: &ClosedPolyline, q: Point2, i_min: usize, i_max: usize) -> Option<bool> {
    let n = curve.len();
    let span = (i_max + n - i_min) % n;
    let edges = curve.edges_near(q, 10.0 * curve.eps());
    let mut first = None;
    for e in edges {
        let in_j1 = (e + n - i_min) % n < span;
        match first {
            None => first = Some(in_j1),
            Some(f) if f != in_j1 => return None,
            _ => {}
        }
    }
    first
}

fn extreme_vertices(curve: &ClosedPolyline) -> (usize, usize) {
    let v = curve.vertices();
    let key_min = |i: &usize| (OrderedFloat(v[*i].x), OrderedFloat(v[*i].y));
    let i_min = (0..v.len()).min_by_key(key_min).unwrap();
    let i_max = (0..v.len()).max_by_key(key_min).unwrap();
    (i_min, i_max)
}

fn root_on_line(curve: &ClosedPolyline, x: f64, i_min: usize, i_max: usize) -> Option<RootPoint> {
    let hits = vertical_line_hits(curve, x).hits;
    for w in hits.windows(2) {
        let (lo, hi) = (w[0].y_high, w[1].y_low);
        if hi - lo <= 10.0 * curve.eps() {
            continue;
        }
        let a = arc_of(curve, Point2::new(x, lo), i_min, i_max);
        let b = arc_of(curve, Point2::new(x, hi), i_min, i_max);
        if let (Some(a), Some(b)) = (a, b) {
            if a != b {
                let p = Point2::new(x, 0.5 * (lo + hi));
                let segment = open_segment_at(curve, p).ok()?;
                if segment.is_finite() {
                    return Some(RootPoint {
                        p,
                        segment,
                        method: RootMethod::Lemma,
                    });
                }
            }
        }
    }
    None
}

/// Root point on the middle vertical line whose open segment joins the two
/// arcs between the leftmost and rightmost vertices.
///
/// Candidate gaps between adjacent hits on the line are tested for arc
/// membership of their ends. If none qualifies (numerical trouble), lines
/// inside the middle half are tried, up to 64 of them, before falling back to
/// the vertex centroid.
pub fn find_root_point(curve: &ClosedPolyline) -> Result<RootPoint, EngineError> {
    let (i_min, i_max) = extreme_vertices(curve);
    let (x0, x1) = (curve.vertices()[i_min].x, curve.vertices()[i_max].x);
    let mid = 0.5 * (x0 + x1);
    let quarter = 0.25 * (x1 - x0);
    for k in 0..64 {
        // 0, +1/64, -1/64, +2/64, ... of the half-width of the middle half
        let off = ((k + 1) / 2) as f64 / 64.0 * quarter;
        let x = if k % 2 == 1 { mid + off } else { mid - off };
        if let Some(r) = root_on_line(curve, x, i_min, i_max) {
            return Ok(r);
        }
    }
    let c = curve.centroid_of_vertices();
    match open_segment_at(curve, c) {
        Ok(segment) if segment.is_finite() && odd_crossings_above(curve, c) => Ok(RootPoint {
            p: c,
            segment,
            method: RootMethod::CentroidFallback,
        }),
        _ => Err(EngineError::RootNotFound),
    }
}

fn odd_crossings_above(curve: &ClosedPolyline, p: Point2) -> bool {
    vertical_line_hits(curve, p.x)
        .hits
        .iter()
        .filter(|h| h.y_low > p.y && h.kind == crate::curve::HitKind::Crossing)
        .count()
        % 2
        == 1
}

/// True when both maximal states cover the same region: equal areas and
/// identical membership of `samples` seeded random points.
pub fn sweeps_equivalent(s1: &SweepState, s2: &SweepState, samples: usize, seed: u64) -> Result<bool, EngineError> {
    if !s1.is_maximal() || !s2.is_maximal() {
        return Err(EngineError::NotMaximal);
    }
    let scale = s1.total_area.abs().max(s2.total_area.abs());
    if (s1.total_area - s2.total_area).abs() > 1e-9 * scale {
        return Ok(false);
    }
    let bbox = s1.curve.bbox().union(&s2.curve.bbox());
    let collar = 100.0 * s1.curve.eps().max(s2.curve.eps());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < samples {
        let q = Point2::new(
            rng.gen_range(bbox.min.x..bbox.max.x),
            rng.gen_range(bbox.min.y..bbox.max.y),
        );
        if s1.curve.distance_to(q) <= collar || s2.curve.distance_to(q) <= collar {
            continue;
        }
        checked += 1;
        let in1 = s1.region.locate_closed(q, 0.0).is_some();
        let in2 = s2.region.locate_closed(q, 0.0).is_some();
        if in1 != in2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Relative chord tolerance of [`invert_curve`], as a fraction of `1 / dist(center, J)`.
pub const INVERSION_CHORD_TOLERANCE: f64 = 1e-6;

#[inline]
pub fn invert_point(p: Point2, center: Point2) -> Point2 {
    let (dx, dy) = (p.x - center.x, p.y - center.y);
    let r2 = dx * dx + dy * dy;
    Point2::new(dx / r2, dy / r2)
}

/// Vertices whose two edges meet at less than this angle (radians) are
/// blunted in the inverted image.
pub const INVERSION_SHARP_ANGLE: f64 = 0.05;

/// Image of the curve under `p ↦ (p − c) / |p − c|²`, sampled adaptively.
///
/// Chords stay within [`INVERSION_CHORD_TOLERANCE`]` / dist(c, J)` of the
/// true arcs. Near a vertex sharper than [`INVERSION_SHARP_ANGLE`] the two
/// image arcs come closer than the image's own `ε_geom`, so the apex is cut
/// off where the wedge is a few `ε_geom` wide, and chords nearby are held to a
/// quarter of the local wedge width.
pub fn invert_curve(curve: &ClosedPolyline, center: Point2, samples_per_edge: usize) -> Result<ClosedPolyline, EngineError> {
    let d = curve.distance_to(center);
    if d <= 10.0 * curve.eps() {
        return Err(EngineError::CenterOnCurve);
    }
    let tol = INVERSION_CHORD_TOLERANCE / d;
    let samples = samples_per_edge.max(1);
    let n = curve.len();
    let vs = curve.vertices();
    let lerp = |a: Point2, b: Point2, s: f64| Point2::new(a.x + s * (b.x - a.x), a.y + s * (b.y - a.y));
    let at = |a: Point2, b: Point2, s: f64| invert_point(lerp(a, b, s), center);

    // image ε_geom, from the vertices and each edge's point nearest the center
    let mut reach: Vec<Point2> = vs.iter().map(|&v| invert_point(v, center)).collect();
    for e in 0..n {
        let (a, b) = curve.edge(e);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let s = (((center.x - a.x) * dx + (center.y - a.y) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
        reach.push(at(a, b, s));
    }
    let image_eps = EPS_RELATIVE * BoundingBox::of_points(&reach).diagonal();

    let opening: Vec<f64> = (0..n)
        .map(|i| {
            let (p, q, r) = (vs[(i + n - 1) % n], vs[i], vs[(i + 1) % n]);
            let (u, w) = ((p.x - q.x, p.y - q.y), (r.x - q.x, r.y - q.y));
            (u.0 * w.1 - u.1 * w.0).abs().atan2(u.0 * w.0 + u.1 * w.1)
        })
        .collect();
    let sharp = |i: usize| opening[i] < INVERSION_SHARP_ANGLE;
    // image distance from the apex at which the wedge is 8 ε wide
    let cut = |i: usize| 8.0 * image_eps / opening[i];

    let mut out: Vec<Point2> = Vec::new();
    for e in 0..n {
        let j = (e + 1) % n;
        let (a, b) = curve.edge(e);
        let (ia, ib) = (invert_point(a, center), invert_point(b, center));
        let len = a.distance(b);
        // near a vertex the map scales lengths by 1 / |v − c|²
        let scale = |v: Point2| v.distance(center).powi(2) / len;
        let u_start = if sharp(e) { (cut(e) * scale(a)).min(0.25) } else { 0.0 };
        let u_end = if sharp(j) { 1.0 - (cut(j) * scale(b)).min(0.25) } else { 1.0 };
        let allowed = |pu: Point2, pv: Point2| {
            let mut t = tol;
            if sharp(e) {
                t = t.min(0.25 * opening[e] * pu.distance(ia));
            }
            if sharp(j) {
                t = t.min(0.25 * opening[j] * pv.distance(ib));
            }
            t
        };
        for k in 0..samples {
            let step = (u_end - u_start) / samples as f64;
            let (s0, s1) = (u_start + k as f64 * step, u_start + (k + 1) as f64 * step);
            // depth-first refinement of [s0, s1), emitting left endpoints in order
            let mut stack = vec![(s0, s1)];
            while let Some((u, v)) = stack.pop() {
                let (pu, pv) = (at(a, b, u), at(a, b, v));
                let m = 0.5 * (u + v);
                let dev = crate::geom::point_segment_distance(at(a, b, m), pu, pv);
                if dev > allowed(pu, pv) && v - u > 1e-12 {
                    stack.push((m, v));
                    stack.push((u, m));
                } else {
                    out.push(pu);
                }
            }
        }
        if u_end < 1.0 {
            out.push(at(a, b, u_end));
        }
    }
    let mut pts: Vec<Point2> = Vec::with_capacity(out.len());
    for p in out {
        if pts.last().is_none_or(|q| q.distance(p) > 10.0 * image_eps) {
            pts.push(p);
        }
    }
    while pts.len() > 3 && pts[0].distance(*pts.last().unwrap()) <= 10.0 * image_eps {
        pts.pop();
    }
    ClosedPolyline::new(pts).map_err(EngineError::NonSimpleImage)
}

/// Interior sweep of the inverted curve: its swept set is the exterior of
/// the original curve seen through the inversion about `center`.
#[derive(Clone, Debug)]
pub struct ExteriorSweep {
    pub center: Point2,
    pub image: Arc<ClosedPolyline>,
    pub root: RootPoint,
    pub state: SweepState,
}

/// Samples per edge used by [`exterior_sweep`].
pub const EXTERIOR_SAMPLES_PER_EDGE: usize = 16;

pub fn exterior_sweep(curve: &ClosedPolyline, p_star: Point2, policy: &EnginePolicy) -> Result<ExteriorSweep, EngineError> {
    let image = invert_curve(curve, p_star, EXTERIOR_SAMPLES_PER_EDGE)?;
    let root = find_root_point(&image)?;
    let state = run_sweep(&image, root.p, policy)?;
    Ok(ExteriorSweep {
        center: p_star,
        image: Arc::clone(&state.curve),
        root,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{load_curve, regular_ngon, CurveSpec};

    fn poly(v: &[[f64; 2]]) -> ClosedPolyline {
        load_curve(&CurveSpec::Polyline { vertices: v.to_vec() }).unwrap()
    }

    fn square() -> ClosedPolyline {
        poly(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    fn c_shape() -> ClosedPolyline {
        poly(&[
            [0.0, 0.0],
            [3.0, 0.0],
            [3.0, 3.0],
            [0.0, 3.0],
            [0.0, 2.0],
            [2.0, 2.0],
            [2.0, 1.0],
            [0.0, 1.0],
        ])
    }

    #[test]
    fn root_points() {
        let r = find_root_point(&square()).unwrap();
        assert_eq!(r.p, Point2::new(0.5, 0.5));
        assert_eq!(r.method, RootMethod::Lemma);
        let r = find_root_point(&c_shape()).unwrap();
        assert_eq!(r.p, Point2::new(1.5, 0.5));
        assert_eq!((r.segment.y_low, r.segment.y_high), (0.0, 1.0));
    }

    #[test]
    fn square_and_c_shape_runs() {
        for order in [Order::Fifo, Order::Lifo, Order::LargestFirst] {
            let mut policy = EnginePolicy::with_order(order);
            policy.check_boundary = true;
            let s = run_sweep(&square(), Point2::new(0.5, 0.5), &policy).unwrap();
            assert_eq!((s.step_count, s.total_area, s.frontier.vertical_count()), (1, 1.0, 0));
            assert!(s.is_maximal());
            let c = run_sweep(&c_shape(), Point2::new(1.5, 0.5), &policy).unwrap();
            assert_eq!(c.step_count, 2);
            assert_eq!(c.area_history, vec![5.0, 7.0]);
            assert_eq!(c.tree[1].parent, Some(0));
            assert_eq!(c.tree.len(), c.step_count);
        }
    }

    #[test]
    fn step_on_empty_queue() {
        let mut s = SweepState::start(&square(), Point2::new(0.5, 0.5), &EnginePolicy::default()).unwrap();
        assert_eq!(step(&mut s), Err(EngineError::QueueEmpty));
    }

    #[test]
    fn capped_rectangle_triggers_guard() {
        let policy = EnginePolicy {
            order: Order::Leftmost,
            extension_cap: Some(0.5),
            check_boundary: true,
            ..EnginePolicy::default()
        };
        let s = run_sweep(&square(), Point2::new(0.5, 0.5), &policy).unwrap();
        assert!(s.is_maximal());
        assert_eq!(s.ray_diagnostics.len(), 1);
        assert!(s.ray_diagnostics[0].at_step <= 64);
        assert!((s.total_area - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inversion_radius() {
        let c = regular_ngon(64, 2.0, Point2::new(0.0, 0.0)).unwrap();
        let o = Point2::new(0.0, 0.0);
        let img = invert_curve(&c, o, 1).unwrap();
        for v in c.vertices() {
            assert!((invert_point(*v, o).distance(o) - 0.5).abs() < 1e-12);
        }
        for v in img.vertices() {
            assert!(v.distance(o) >= 0.5 - 1e-12);
        }
        let img = invert_curve(&square(), Point2::new(0.5, 0.5), 8).unwrap();
        let rmax = img
            .vertices()
            .iter()
            .map(|v| v.distance(Point2::new(0.0, 0.0)))
            .fold(0.0, f64::max);
        assert!((rmax - 2.0).abs() < 1e-9);
        assert_eq!(invert_curve(&square(), Point2::new(0.5, 0.0), 8).unwrap_err(), EngineError::CenterOnCurve);
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("largest".parse::<Order>(), Ok(Order::LargestFirst));
        assert!("random".parse::<Order>().is_err());
    }
}
