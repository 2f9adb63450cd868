//! SVG frames of a sweep in progress.
//!
//! Coordinates are mapped onto a canvas 1000 units wide with y pointing up,
//! and written with four decimals so frames are stable across runs.

use std::fmt::Write as _;

use sweepline::engine::SweepState;
use sweepline::segment::HorizontalFreeSegment;
use sweepline::{BoundingBox, Point2};

const WIDTH: f64 = 1000.0;
const PAD: f64 = 20.0;

struct Canvas {
    bbox: BoundingBox,
    scale: f64,
    height: f64,
}

impl Canvas {
    fn new(bbox: BoundingBox) -> Self {
        let span = bbox.width().max(bbox.height()).max(f64::MIN_POSITIVE);
        let scale = (WIDTH - 2.0 * PAD) / span;
        Self {
            bbox,
            scale,
            height: bbox.height() * scale + 2.0 * PAD,
        }
    }

    fn map(&self, p: Point2) -> (f64, f64) {
        let x = PAD + (p.x - self.bbox.min.x) * self.scale;
        let y = self.height - PAD - (p.y - self.bbox.min.y) * self.scale;
        (x, y)
    }

    fn move_to(&self, out: &mut String, cmd: char, p: Point2) {
        let (x, y) = self.map(p);
        let _ = write!(out, "{cmd}{x:.4} {y:.4}");
    }
}

/// Renders the curve (black), swept trapezoids (filled), live frontier
/// verticals (red) and, when given, the segment `current` (blue).
pub fn frame(state: &SweepState, current: Option<&HorizontalFreeSegment>) -> String {
    let canvas = Canvas::new(state.curve.bbox());
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{h:.0}" viewBox="0 0 {WIDTH:.0} {h:.4}">"#,
        h = canvas.height,
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let mut d = String::new();
    for trap in state.region.trapezoids() {
        for (i, c) in trap.corners().into_iter().enumerate() {
            canvas.move_to(&mut d, if i == 0 { 'M' } else { 'L' }, c);
        }
        d.push('Z');
    }
    let _ = writeln!(svg, r##"<path d="{d}" fill="#9ecae1" stroke="none"/>"##);

    d.clear();
    for (i, &v) in state.curve.vertices().iter().enumerate() {
        canvas.move_to(&mut d, if i == 0 { 'M' } else { 'L' }, v);
    }
    d.push('Z');
    let _ = writeln!(
        svg,
        r##"<path d="{d}" fill="none" stroke="black" stroke-width="1"/>"##
    );

    d.clear();
    for v in state.frontier.verticals() {
        canvas.move_to(&mut d, 'M', Point2::new(v.x, v.y_low));
        canvas.move_to(&mut d, 'L', Point2::new(v.x, v.y_high));
    }
    if !d.is_empty() {
        let _ = writeln!(
            svg,
            r##"<path d="{d}" fill="none" stroke="red" stroke-width="1.5"/>"##
        );
    }

    if let Some(t) = current.filter(|t| t.is_finite()) {
        d.clear();
        canvas.move_to(&mut d, 'M', t.left_point());
        canvas.move_to(&mut d, 'L', t.right_point());
        let _ = writeln!(
            svg,
            r##"<path d="{d}" fill="none" stroke="blue" stroke-width="2"/>"##
        );
    }
    svg.push_str("</svg>\n");
    svg
}
