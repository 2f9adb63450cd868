//! Horizontal sweeps: profiles, jumps, trapezoids and the boundary loop.
//!
//! For a horizontal free segment `t` at height `y0` over `(a, b)`, the upper
//! profile maps `x` to the first curve point above `(x, y0)` and the lower
//! profile to the first one below. Both are piecewise linear. They can only
//! change edge at the x of a vertex that sees the line `y = y0` vertically,
//! so those x values cut `(a, b)` into slabs. Each slab is one trapezoid.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{ClosedPolyline, HitKind};
use crate::geom::{Axis, Line, Point2};
use crate::segment::{EndpointKind, HorizontalFreeSegment};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("segment interior meets the curve at x = {0}")]
    SegmentTouchesCurve(f64),
    #[error("segment has no interior")]
    EmptySegment,
    #[error("profile is unbounded at x = {0}")]
    UnboundedProfile(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileSide {
    Upper,
    Lower,
}

/// Linear piece of a profile over `[x_start, x_end]`, lying on curve edge `edge`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfilePiece {
    pub x_start: f64,
    pub x_end: f64,
    pub line: Line,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discontinuity {
    pub x: f64,
    pub y_minus: f64,
    pub y_plus: f64,
    /// Sub-intervals of the jump whose interiors miss the curve, ascending.
    pub free_subsegments: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub side: ProfileSide,
    pub pieces: Vec<ProfilePiece>,
    pub jumps: Vec<Discontinuity>,
}

impl Profile {
    /// Profile value at `x`; at a breakpoint the piece to the right wins.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self
            .pieces
            .partition_point(|p| p.x_end <= x)
            .min(self.pieces.len() - 1);
        self.pieces[i].line.eval(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trapezoid {
    pub x_left: f64,
    pub x_right: f64,
    pub top: Line,
    pub bottom: Line,
}

impl Trapezoid {
    pub fn area(&self) -> f64 {
        let hl = self.top.eval(self.x_left) - self.bottom.eval(self.x_left);
        let hr = self.top.eval(self.x_right) - self.bottom.eval(self.x_right);
        0.5 * (self.x_right - self.x_left) * (hl + hr)
    }

    /// True when `p` is inside with at least `margin` clearance along both axes.
    pub fn contains(&self, p: Point2, margin: f64) -> bool {
        self.x_left + margin < p.x
            && p.x < self.x_right - margin
            && self.bottom.eval(p.x) + margin < p.y
            && p.y < self.top.eval(p.x) - margin
    }

    /// Containment with the vertical sides treated as closed.
    pub(crate) fn contains_closed_x(&self, p: Point2, margin: f64) -> bool {
        self.x_left <= p.x
            && p.x <= self.x_right
            && self.bottom.eval(p.x) + margin < p.y
            && p.y < self.top.eval(p.x) - margin
    }

    pub fn y_range(&self) -> (f64, f64) {
        let lo = self.bottom.eval(self.x_left).min(self.bottom.eval(self.x_right));
        let hi = self.top.eval(self.x_left).max(self.top.eval(self.x_right));
        (lo, hi)
    }

    pub fn corners(&self) -> [Point2; 4] {
        [
            Point2::new(self.x_left, self.bottom.eval(self.x_left)),
            Point2::new(self.x_right, self.bottom.eval(self.x_right)),
            Point2::new(self.x_right, self.top.eval(self.x_right)),
            Point2::new(self.x_left, self.top.eval(self.x_left)),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    /// A piece of one curve edge, traversed in curve order.
    CurveArc,
    /// A vertical piece off the curve coming from a profile jump.
    FreeVertical,
    /// A vertical piece off the curve closing a segment end that lies in free space.
    EndVertical,
}

/// One straight piece of a boundary loop, directed so the swept side is on the left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryElement {
    pub kind: ElementKind,
    pub from: Point2,
    pub to: Point2,
    /// Curve edge carrying a [`ElementKind::CurveArc`].
    pub edge: Option<usize>,
}

impl BoundaryElement {
    pub fn is_vertical(&self) -> bool {
        self.kind != ElementKind::CurveArc
    }

    pub fn length(&self) -> f64 {
        self.from.distance(self.to)
    }

    /// For verticals: `(x, y_low, y_high)`.
    pub fn vertical_span(&self) -> (f64, f64, f64) {
        (
            self.from.x,
            self.from.y.min(self.to.y),
            self.from.y.max(self.to.y),
        )
    }

    /// For verticals: true when directed upward, which leaves the swept
    /// region on the left (west) and exposes the east side.
    pub fn is_upward(&self) -> bool {
        self.to.y > self.from.y
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepBoundary {
    pub elements: Vec<BoundaryElement>,
}

impl SweepBoundary {
    pub fn count(&self, kind: ElementKind) -> usize {
        self.elements.iter().filter(|e| e.kind == kind).count()
    }

    /// Largest distance between the end of an element and the start of the next.
    pub fn closure_gap(&self) -> f64 {
        let n = self.elements.len();
        (0..n)
            .map(|i| self.elements[i].to.distance(self.elements[(i + 1) % n].from))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizontalSweep {
    pub t: HorizontalFreeSegment,
    pub upper: Profile,
    pub lower: Profile,
    pub trapezoids: Vec<Trapezoid>,
    pub boundary: SweepBoundary,
    pub area: f64,
}

fn edge_line(curve: &ClosedPolyline, e: usize, fallback_y: f64) -> Line {
    let (a, b) = curve.edge(e);
    if a.x == b.x {
        Line::horizontal(fallback_y)
    } else if a.x < b.x {
        Line::through(a, b)
    } else {
        Line::through(b, a)
    }
}

/// Upper and lower profiles of the sweep over `t`, without jumps filled in.
fn raw_profiles(
    curve: &ClosedPolyline,
    t: &HorizontalFreeSegment,
) -> Result<(Profile, Profile), SweepError> {
    let eps = curve.eps();
    if !t.is_finite() {
        return Err(SweepError::UnboundedProfile(if t.x_left.is_finite() {
            t.x_right
        } else {
            t.x_left
        }));
    }
    if t.length() <= eps {
        return Err(SweepError::EmptySegment);
    }
    let (a, b, y0) = (t.x_left, t.x_right, t.y);
    if let Some((x, _)) = curve.shoot(Axis::Y, y0, a + eps, true, |_| false) {
        if x < b - eps {
            return Err(SweepError::SegmentTouchesCurve(x));
        }
    }
    let mut xs = vec![a];
    xs.extend(curve.walls().stabbing(y0, a, b));
    xs.push(b);
    let mut upper = Vec::with_capacity(xs.len());
    let mut lower = Vec::with_capacity(xs.len());
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 <= x0 {
            continue;
        }
        let xm = 0.5 * (x0 + x1);
        let (yu, eu) = curve
            .shoot(Axis::X, xm, y0, true, |_| false)
            .ok_or(SweepError::UnboundedProfile(xm))?;
        let (yl, el) = curve
            .shoot(Axis::X, xm, y0, false, |_| false)
            .ok_or(SweepError::UnboundedProfile(xm))?;
        upper.push(ProfilePiece {
            x_start: x0,
            x_end: x1,
            line: edge_line(curve, eu, yu),
            edge: eu,
        });
        lower.push(ProfilePiece {
            x_start: x0,
            x_end: x1,
            line: edge_line(curve, el, yl),
            edge: el,
        });
    }
    Ok((
        Profile {
            side: ProfileSide::Upper,
            pieces: upper,
            jumps: Vec::new(),
        },
        Profile {
            side: ProfileSide::Lower,
            pieces: lower,
            jumps: Vec::new(),
        },
    ))
}

/// Upper and lower profiles of the sweep over `t`, jumps included.
pub fn compute_profiles(
    curve: &ClosedPolyline,
    t: &HorizontalFreeSegment,
) -> Result<(Profile, Profile), SweepError> {
    let (mut upper, mut lower) = raw_profiles(curve, t)?;
    upper.jumps = detect_discontinuities(&upper, curve);
    lower.jumps = detect_discontinuities(&lower, curve);
    Ok((upper, lower))
}

/// Interior breakpoints where the one-sided limits differ by more than `ε_geom`.
pub fn detect_discontinuities(profile: &Profile, curve: &ClosedPolyline) -> Vec<Discontinuity> {
    let eps = curve.eps();
    profile
        .pieces
        .windows(2)
        .filter_map(|w| {
            let x = w[0].x_end;
            let y_minus = w[0].line.eval(x);
            let y_plus = w[1].line.eval(x);
            ((y_minus - y_plus).abs() > eps).then(|| Discontinuity {
                x,
                y_minus,
                y_plus,
                free_subsegments: decompose_vertical(curve, x, y_minus.min(y_plus), y_minus.max(y_plus))
                    .into_iter()
                    .filter_map(|p| match p {
                        VerticalPiece::Free(lo, hi) => Some((lo, hi)),
                        VerticalPiece::OnEdge(..) => None,
                    })
                    .collect(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum VerticalPiece {
    Free(f64, f64),
    OnEdge(usize, f64, f64),
}

/// Splits `{x} × [lo, hi]` into curve-free pieces and pieces of vertical
/// curve edges, ascending. Pieces of length `≤ ε_geom` are dropped.
pub(crate) fn decompose_vertical(curve: &ClosedPolyline, x: f64, lo: f64, hi: f64) -> Vec<VerticalPiece> {
    let eps = curve.eps();
    let mut on_edge: Vec<(usize, f64, f64)> = curve
        .vertical_edges_at(x)
        .into_iter()
        .filter_map(|(e, a, b)| {
            let (a, b) = (a.max(lo), b.min(hi));
            (b - a > eps).then_some((e, a, b))
        })
        .collect();
    on_edge.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut cuts: Vec<f64> = curve
        .line_hits(Axis::X, x)
        .into_iter()
        .filter(|h| h.kind != HitKind::EdgeOverlap && h.y_low > lo + eps && h.y_low < hi - eps)
        .map(|h| h.y_low)
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let free = |a: f64, b: f64, out: &mut Vec<VerticalPiece>| {
        let mut start = a;
        for &c in cuts.iter().filter(|&&c| a < c && c < b) {
            if c - start > eps {
                out.push(VerticalPiece::Free(start, c));
            }
            start = c;
        }
        if b - start > eps {
            out.push(VerticalPiece::Free(start, b));
        }
    };
    let mut cursor = lo;
    for (e, a, b) in on_edge {
        if a > cursor {
            free(cursor, a, &mut out);
        }
        out.push(VerticalPiece::OnEdge(e, a.max(cursor), b));
        cursor = cursor.max(b);
    }
    if hi > cursor {
        free(cursor, hi, &mut out);
    }
    out
}

struct BoundaryBuilder<'a> {
    curve: &'a ClosedPolyline,
    eps: f64,
    elements: Vec<BoundaryElement>,
}

impl BoundaryBuilder<'_> {
    fn arc(&mut self, edge: usize, from: Point2, to: Point2) {
        if from.distance(to) <= self.eps {
            return;
        }
        if let Some(last) = self.elements.last_mut() {
            if last.kind == ElementKind::CurveArc
                && last.edge == Some(edge)
                && last.to.distance(from) <= self.eps
            {
                last.to = to;
                return;
            }
        }
        self.elements.push(BoundaryElement {
            kind: ElementKind::CurveArc,
            from,
            to,
            edge: Some(edge),
        });
    }

    fn vertical(&mut self, x: f64, y_from: f64, y_to: f64, free_kind: ElementKind) {
        if (y_to - y_from).abs() <= self.eps {
            return;
        }
        let mut pieces = decompose_vertical(self.curve, x, y_from.min(y_to), y_from.max(y_to));
        let up = y_to > y_from;
        if !up {
            pieces.reverse();
        }
        for piece in pieces {
            let (lo, hi, edge) = match piece {
                VerticalPiece::Free(lo, hi) => (lo, hi, None),
                VerticalPiece::OnEdge(e, lo, hi) => (lo, hi, Some(e)),
            };
            let (a, b) = if up { (lo, hi) } else { (hi, lo) };
            let (from, to) = (Point2::new(x, a), Point2::new(x, b));
            match edge {
                Some(e) => self.arc(e, from, to),
                None => self.elements.push(BoundaryElement {
                    kind: free_kind,
                    from,
                    to,
                    edge: None,
                }),
            }
        }
    }
}

fn end_kind(kind: EndpointKind) -> ElementKind {
    if kind == EndpointKind::Free {
        ElementKind::EndVertical
    } else {
        ElementKind::FreeVertical
    }
}

/// Builds `H(t)` with its trapezoids and counterclockwise boundary loop.
pub fn build_sweep(
    curve: &ClosedPolyline,
    t: &HorizontalFreeSegment,
) -> Result<HorizontalSweep, SweepError> {
    let (upper, lower) = compute_profiles(curve, t)?;
    let trapezoids: Vec<Trapezoid> = upper
        .pieces
        .iter()
        .zip(&lower.pieces)
        .map(|(u, l)| Trapezoid {
            x_left: u.x_start,
            x_right: u.x_end,
            top: u.line,
            bottom: l.line,
        })
        .collect();
    let area = trapezoids.iter().map(Trapezoid::area).sum();

    let mut b = BoundaryBuilder {
        curve,
        eps: curve.eps(),
        elements: Vec::new(),
    };
    let k = lower.pieces.len();
    for i in 0..k {
        let p = lower.pieces[i];
        b.arc(
            p.edge,
            Point2::new(p.x_start, p.line.eval(p.x_start)),
            Point2::new(p.x_end, p.line.eval(p.x_end)),
        );
        if i + 1 < k {
            let x = p.x_end;
            let next = lower.pieces[i + 1].line.eval(x);
            b.vertical(x, p.line.eval(x), next, ElementKind::FreeVertical);
        }
    }
    let (lb, ub) = (lower.pieces[k - 1], upper.pieces[k - 1]);
    b.vertical(
        t.x_right,
        lb.line.eval(t.x_right),
        ub.line.eval(t.x_right),
        end_kind(t.right_kind),
    );
    for i in (0..k).rev() {
        let p = upper.pieces[i];
        b.arc(
            p.edge,
            Point2::new(p.x_end, p.line.eval(p.x_end)),
            Point2::new(p.x_start, p.line.eval(p.x_start)),
        );
        if i > 0 {
            let x = p.x_start;
            let next = upper.pieces[i - 1].line.eval(x);
            b.vertical(x, p.line.eval(x), next, ElementKind::FreeVertical);
        }
    }
    let (lf, uf) = (lower.pieces[0], upper.pieces[0]);
    b.vertical(
        t.x_left,
        uf.line.eval(t.x_left),
        lf.line.eval(t.x_left),
        end_kind(t.left_kind),
    );
    // the loop may start and end on the same edge
    if b.elements.len() > 1 {
        let (first, last) = (b.elements[0], *b.elements.last().unwrap());
        if first.kind == ElementKind::CurveArc
            && first.edge == last.edge
            && last.kind == ElementKind::CurveArc
            && last.to.distance(first.from) <= b.eps
        {
            b.elements[0].from = last.from;
            b.elements.pop();
        }
    }

    Ok(HorizontalSweep {
        t: *t,
        upper,
        lower,
        trapezoids,
        boundary: SweepBoundary {
            elements: b.elements,
        },
        area,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{load_curve, CurveSpec};
    use crate::segment::horizontal_segment_at;

    fn poly(v: &[[f64; 2]]) -> ClosedPolyline {
        load_curve(&CurveSpec::Polyline { vertices: v.to_vec() }).unwrap()
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

    fn sweep_at(c: &ClosedPolyline, x: f64, y: f64) -> HorizontalSweep {
        let t = horizontal_segment_at(c, Point2::new(x, y)).unwrap();
        build_sweep(c, &t).unwrap()
    }

    #[test]
    fn square_sweep() {
        let sq = poly(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let s = sweep_at(&sq, 0.5, 0.5);
        assert_eq!(s.trapezoids.len(), 1);
        assert_eq!(s.area, 1.0);
        assert!(s.upper.jumps.is_empty() && s.lower.jumps.is_empty());
        assert_eq!(s.boundary.elements.len(), 4);
        assert_eq!(s.boundary.count(ElementKind::CurveArc), 4);
        assert_eq!(s.boundary.closure_gap(), 0.0);
    }

    #[test]
    fn c_shape_sweep() {
        let c = c_shape();
        let s = sweep_at(&c, 0.5, 0.5);
        assert_eq!(s.area, 5.0);
        assert_eq!(s.trapezoids.len(), 2);
        assert_eq!(s.upper.jumps.len(), 1);
        let j = &s.upper.jumps[0];
        assert_eq!((j.x, j.y_minus, j.y_plus), (2.0, 1.0, 3.0));
        assert_eq!(j.free_subsegments, vec![(2.0, 3.0)]);
        assert!(s.lower.jumps.is_empty());
        let free: Vec<_> = s
            .boundary
            .elements
            .iter()
            .filter(|e| e.kind == ElementKind::FreeVertical)
            .collect();
        assert_eq!(free.len(), 1);
        assert_eq!(free[0].vertical_span(), (2.0, 2.0, 3.0));
        assert!(!free[0].is_upward());
        assert_eq!(s.boundary.closure_gap(), 0.0);
    }

    #[test]
    fn triangle_profile() {
        let tri = poly(&[[0.0, 0.0], [2.0, 0.0], [1.0, 2.0]]);
        let t = HorizontalFreeSegment {
            y: 0.5,
            x_left: 0.25,
            x_right: 1.75,
            left_kind: EndpointKind::OnCurve,
            right_kind: EndpointKind::OnCurve,
        };
        let (u, l) = compute_profiles(&tri, &t).unwrap();
        assert!(u.jumps.is_empty() && l.jumps.is_empty());
        assert_eq!(u.pieces.len(), 2);
        assert!((u.eval(0.25) - 0.5).abs() < 1e-15);
        assert!((u.eval(1.0) - 2.0).abs() < 1e-15);
        assert_eq!(l.eval(0.7), 0.0);
    }

    #[test]
    fn touching_segment_is_rejected() {
        let c = c_shape();
        let t = HorizontalFreeSegment {
            y: 1.5,
            x_left: 0.0,
            x_right: 3.0,
            left_kind: EndpointKind::OnCurve,
            right_kind: EndpointKind::OnCurve,
        };
        assert_eq!(compute_profiles(&c, &t), Err(SweepError::SegmentTouchesCurve(2.0)));
    }
}
