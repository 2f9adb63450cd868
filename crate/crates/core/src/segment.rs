//! Maximal free segments through a point: vertical `s_p` and horizontal `t`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::ClosedPolyline;
use crate::geom::{Axis, Point2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentError {
    #[error("point ({0}, {1}) lies on the curve")]
    PointOnCurve(f64, f64),
    #[error("segment has no interior")]
    EmptySegment,
}

/// What bounds a free segment at one end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndpointKind {
    /// The endpoint lies on the curve.
    OnCurve,
    /// No curve point on that side; the coordinate is infinite.
    Infinite,
    /// The endpoint was chosen inside free space (a frontier crossing or a cap).
    Free,
}

/// Vertical open segment `{x} × (y_low, y_high)` whose interior misses the curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpenSegment {
    pub x: f64,
    pub y_low: f64,
    pub y_high: f64,
    pub low_kind: EndpointKind,
    pub high_kind: EndpointKind,
}

impl OpenSegment {
    pub fn length(&self) -> f64 {
        self.y_high - self.y_low
    }

    pub fn is_finite(&self) -> bool {
        self.y_low.is_finite() && self.y_high.is_finite()
    }

    pub fn midpoint(&self) -> Point2 {
        Point2::new(self.x, 0.5 * (self.y_low + self.y_high))
    }

    pub fn low_point(&self) -> Point2 {
        Point2::new(self.x, self.y_low)
    }

    pub fn high_point(&self) -> Point2 {
        Point2::new(self.x, self.y_high)
    }
}

/// Horizontal segment `(x_left, x_right) × {y}` whose interior misses the curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizontalFreeSegment {
    pub y: f64,
    pub x_left: f64,
    pub x_right: f64,
    pub left_kind: EndpointKind,
    pub right_kind: EndpointKind,
}

impl HorizontalFreeSegment {
    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }

    pub fn is_finite(&self) -> bool {
        self.x_left.is_finite() && self.x_right.is_finite()
    }

    pub fn left_point(&self) -> Point2 {
        Point2::new(self.x_left, self.y)
    }

    pub fn right_point(&self) -> Point2 {
        Point2::new(self.x_right, self.y)
    }
}

fn end(hit: Option<(f64, usize)>, infinity: f64) -> (f64, EndpointKind) {
    match hit {
        Some((v, _)) => (v, EndpointKind::OnCurve),
        None => (infinity, EndpointKind::Infinite),
    }
}

/// The maximal vertical free segment through `p`.
pub fn open_segment_at(curve: &ClosedPolyline, p: Point2) -> Result<OpenSegment, SegmentError> {
    if curve.distance_to(p) <= curve.eps() {
        return Err(SegmentError::PointOnCurve(p.x, p.y));
    }
    let (y_high, high_kind) = end(curve.shoot(Axis::X, p.x, p.y, true, |_| false), f64::INFINITY);
    let (y_low, low_kind) = end(
        curve.shoot(Axis::X, p.x, p.y, false, |_| false),
        f64::NEG_INFINITY,
    );
    Ok(OpenSegment {
        x: p.x,
        y_low,
        y_high,
        low_kind,
        high_kind,
    })
}

/// The maximal horizontal free segment through `p`.
pub fn horizontal_segment_at(
    curve: &ClosedPolyline,
    p: Point2,
) -> Result<HorizontalFreeSegment, SegmentError> {
    if curve.distance_to(p) <= curve.eps() {
        return Err(SegmentError::PointOnCurve(p.x, p.y));
    }
    let (x_right, right_kind) =
        end(curve.shoot(Axis::Y, p.y, p.x, true, |_| false), f64::INFINITY);
    let (x_left, left_kind) = end(
        curve.shoot(Axis::Y, p.y, p.x, false, |_| false),
        f64::NEG_INFINITY,
    );
    Ok(HorizontalFreeSegment {
        y: p.y,
        x_left,
        x_right,
        left_kind,
        right_kind,
    })
}

/// Curve vertices closer than this many `ε_geom` to a horizontal segment's
/// line end the segment, even when they do not cross it.
pub const GRAZE_FACTOR: f64 = 10.0;

/// Pulls the end of a horizontal segment at height `y` starting at `from`
/// back to the first vertex that grazes its line.
pub(crate) fn clip_grazing(
    curve: &ClosedPolyline,
    y: f64,
    from: f64,
    end: (f64, EndpointKind),
) -> (f64, EndpointKind) {
    if !end.0.is_finite() {
        return end;
    }
    match curve.vertex_near_row(y, from, end.0, GRAZE_FACTOR * curve.eps()) {
        Some(x) => (x, EndpointKind::OnCurve),
        None => end,
    }
}

/// [`horizontal_segment_at`] with both ends pulled back to grazing vertices,
/// so that the segment keeps a clearance of `GRAZE_FACTOR · ε_geom` from the curve.
pub fn clear_horizontal_segment_at(
    curve: &ClosedPolyline,
    p: Point2,
) -> Result<HorizontalFreeSegment, SegmentError> {
    let h = horizontal_segment_at(curve, p)?;
    let (x_right, right_kind) = clip_grazing(curve, p.y, p.x, (h.x_right, h.right_kind));
    let (x_left, left_kind) = clip_grazing(curve, p.y, p.x, (h.x_left, h.left_kind));
    Ok(HorizontalFreeSegment {
        x_left,
        x_right,
        left_kind,
        right_kind,
        ..h
    })
}
