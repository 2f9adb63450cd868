//! Brute-force reference checks for simple polygons.
//!
//! Everything here works on plain `[f64; 2]` coordinate pairs and walks every
//! edge for every query. Nothing is indexed or cached, and nothing depends on
//! the sweep engine, so the results can be used to check that engine.

use rand::Rng;

/// A polygon vertex, `[x, y]`.
pub type Xy = [f64; 2];

/// Relative tolerance applied to the bounding-box diagonal.
pub const RELATIVE_TOLERANCE: f64 = 1e-9;

/// Result of a point-in-polygon query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub inside: bool,
    pub on_boundary: bool,
}

/// A vertical open segment `{x} × (y_low, y_high)`; `None` marks an infinite end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleSegment {
    pub x: f64,
    pub y_low: Option<f64>,
    pub y_high: Option<f64>,
}

/// A horizontal open segment `(x_left, x_right) × {y}`; `None` marks an infinite end.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleHorizontalSegment {
    pub y: f64,
    pub x_left: Option<f64>,
    pub x_right: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleError {
    /// The query point lies on the polygon boundary.
    PointOnCurve,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleHitKind {
    Crossing,
    Touch,
    EdgeOverlap,
}

/// One connected piece of `line ∩ polygon`, given as an interval along the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleHit {
    pub low: f64,
    pub high: f64,
    pub kind: OracleHitKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimplicityReport {
    pub simple: bool,
    /// Edge indices `(i, j)` of the first offending pair, edge `i` running
    /// from vertex `i` to vertex `i + 1`.
    pub first_violation: Option<(usize, usize)>,
}

pub fn bounding_diagonal(poly: &[Xy]) -> f64 {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in poly {
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
    }
    ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt()
}

pub fn tolerance(poly: &[Xy]) -> f64 {
    RELATIVE_TOLERANCE * bounding_diagonal(poly)
}

fn edges(poly: &[Xy]) -> impl Iterator<Item = (usize, Xy, Xy)> + '_ {
    (0..poly.len()).map(move |i| (i, poly[i], poly[(i + 1) % poly.len()]))
}

pub fn point_segment_distance(p: Xy, a: Xy, b: Xy) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a[0] + t * dx, a[1] + t * dy);
    ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt()
}

pub fn distance_to_polygon(poly: &[Xy], p: Xy) -> f64 {
    edges(poly)
        .map(|(_, a, b)| point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

fn orient(a: Xy, b: Xy, c: Xy) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Distance between two closed segments (zero when they cross).
pub fn segment_segment_distance(a: Xy, b: Xy, c: Xy, d: Xy) -> f64 {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Twice the signed area; positive for counterclockwise vertex order.
pub fn signed_area(poly: &[Xy]) -> f64 {
    0.5 * edges(poly)
        .map(|(_, a, b)| a[0] * b[1] - b[0] * a[1])
        .sum::<f64>()
}

/// `½·|Σ x_i·y_{i+1} − x_{i+1}·y_i|`.
pub fn shoelace_area(poly: &[Xy]) -> f64 {
    signed_area(poly).abs()
}

/// Even-odd rule with a ray whose direction is rotated until it clears every
/// vertex by more than the tolerance.
pub fn raycast_point_in_polygon(poly: &[Xy], q: Xy) -> OracleVerdict {
    let tol = tolerance(poly);
    if distance_to_polygon(poly, q) <= tol {
        return OracleVerdict {
            inside: false,
            on_boundary: true,
        };
    }
    let mut angle: f64 = 0.371_861_5;
    'attempt: for _ in 0..64 {
        let d = [angle.cos(), angle.sin()];
        angle += 0.618_033_988_7;
        // reject directions that graze a vertex
        for v in poly {
            let rel = [v[0] - q[0], v[1] - q[1]];
            let along = rel[0] * d[0] + rel[1] * d[1];
            let perp = (rel[0] * d[1] - rel[1] * d[0]).abs();
            if along > 0.0 && perp <= 1e3 * tol.max(f64::MIN_POSITIVE) {
                continue 'attempt;
            }
        }
        let mut crossings = 0usize;
        for (_, a, b) in edges(poly) {
            let e = [b[0] - a[0], b[1] - a[1]];
            let denom = d[0] * e[1] - d[1] * e[0];
            if denom == 0.0 {
                continue;
            }
            let w = [a[0] - q[0], a[1] - q[1]];
            let t = (w[0] * e[1] - w[1] * e[0]) / denom;
            let s = (w[0] * d[1] - w[1] * d[0]) / denom;
            if t > 0.0 && (0.0..1.0).contains(&s) {
                crossings += 1;
            }
        }
        return OracleVerdict {
            inside: crossings % 2 == 1,
            on_boundary: false,
        };
    }
    panic!("no clear ray direction found for query {q:?}");
}

/// Quadratic pairwise edge test. Non-adjacent edges closer than the tolerance
/// and adjacent edges that fold back onto each other both count as violations.
pub fn simplicity_check(poly: &[Xy]) -> SimplicityReport {
    let n = poly.len();
    let ok = SimplicityReport {
        simple: true,
        first_violation: None,
    };
    if n < 3 {
        return SimplicityReport {
            simple: false,
            first_violation: None,
        };
    }
    let tol = tolerance(poly);
    let edge = |i: usize| (poly[i], poly[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        if point_segment_distance(a, b, b) <= tol {
            return SimplicityReport {
                simple: false,
                first_violation: Some((i, i)),
            };
        }
        for j in i + 1..n {
            let (c, d) = edge(j);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let bad = if adjacent {
                // shared vertex is b == c (j = i + 1) or a == d (wrap-around)
                let (far_i, far_j) = if j == i + 1 { (a, d) } else { (b, c) };
                point_segment_distance(far_j, a, b) <= tol
                    || point_segment_distance(far_i, c, d) <= tol
            } else {
                segment_segment_distance(a, b, c, d) <= tol
            };
            if bad {
                return SimplicityReport {
                    simple: false,
                    first_violation: Some((i, j)),
                };
            }
        }
    }
    ok
}

/// All intersections of the vertical line at `x` with the polygon, found by
/// walking the vertex loop and tracking which side of the line each vertex is on.
pub fn brute_force_vertical_hits(poly: &[Xy], x: f64) -> Vec<OracleHit> {
    line_hits(poly, x, |p| p[0], |p| p[1])
}

/// Horizontal counterpart of [`brute_force_vertical_hits`]; intervals are in x.
pub fn brute_force_horizontal_hits(poly: &[Xy], y: f64) -> Vec<OracleHit> {
    line_hits(poly, y, |p| p[1], |p| p[0])
}

fn line_hits(
    poly: &[Xy],
    c: f64,
    along: impl Fn(Xy) -> f64,
    across: impl Fn(Xy) -> f64,
) -> Vec<OracleHit> {
    let n = poly.len();
    let side = |i: usize| {
        let u = along(poly[i % n]);
        if u < c {
            -1i8
        } else if u > c {
            1
        } else {
            0
        }
    };
    let mut hits = Vec::new();
    // start the walk at a vertex that is off the line, if there is one
    let Some(start) = (0..n).find(|&i| side(i) != 0) else {
        let lo = poly.iter().map(|&p| across(p)).fold(f64::INFINITY, f64::min);
        let hi = poly.iter().map(|&p| across(p)).fold(f64::NEG_INFINITY, f64::max);
        return vec![OracleHit {
            low: lo,
            high: hi,
            kind: OracleHitKind::EdgeOverlap,
        }];
    };
    let mut k = 0;
    while k < n {
        let i = start + k;
        let j = i + 1;
        let (si, sj) = (side(i), side(j));
        if si != 0 && sj != 0 {
            if si != sj {
                let (a, b) = (poly[i % n], poly[j % n]);
                let t = (c - along(a)) / (along(b) - along(a));
                let y = across(a) + t * (across(b) - across(a));
                hits.push(OracleHit {
                    low: y,
                    high: y,
                    kind: OracleHitKind::Crossing,
                });
            }
            k += 1;
            continue;
        }
        if si != 0 && sj == 0 {
            // run of on-line vertices starting at j
            let mut m = j;
            let mut lo = across(poly[m % n]);
            let mut hi = lo;
            while side(m + 1) == 0 {
                m += 1;
                lo = lo.min(across(poly[m % n]));
                hi = hi.max(across(poly[m % n]));
            }
            let after = side(m + 1);
            let kind = if m > j {
                OracleHitKind::EdgeOverlap
            } else if after == si {
                OracleHitKind::Touch
            } else {
                OracleHitKind::Crossing
            };
            hits.push(OracleHit {
                low: lo,
                high: hi,
                kind,
            });
            k = m - start;
            continue;
        }
        k += 1;
    }
    hits.sort_by(|a, b| a.low.total_cmp(&b.low));
    hits
}

/// The maximal vertical segment through `p` whose interior misses the polygon.
pub fn brute_force_open_segment(poly: &[Xy], p: Xy) -> Result<OracleSegment, OracleError> {
    let tol = tolerance(poly);
    if distance_to_polygon(poly, p) <= tol {
        return Err(OracleError::PointOnCurve);
    }
    // per-edge scan, independent of the walk in `line_hits`
    let mut below: Option<f64> = None;
    let mut above: Option<f64> = None;
    for (_, a, b) in edges(poly) {
        let (lo, hi) = if a[0] == p[0] && b[0] == p[0] {
            (a[1].min(b[1]), a[1].max(b[1]))
        } else if (a[0] <= p[0] && p[0] <= b[0]) || (b[0] <= p[0] && p[0] <= a[0]) {
            let y = if a[0] == p[0] {
                a[1]
            } else if b[0] == p[0] {
                b[1]
            } else {
                a[1] + (p[0] - a[0]) * (b[1] - a[1]) / (b[0] - a[0])
            };
            (y, y)
        } else {
            continue;
        };
        if lo <= p[1] && p[1] <= hi {
            return Err(OracleError::PointOnCurve);
        }
        if hi < p[1] {
            below = Some(below.map_or(hi, |v: f64| v.max(hi)));
        } else {
            above = Some(above.map_or(lo, |v: f64| v.min(lo)));
        }
    }
    Ok(OracleSegment {
        x: p[0],
        y_low: below,
        y_high: above,
    })
}

/// Horizontal counterpart of [`brute_force_open_segment`].
pub fn brute_force_horizontal_segment(
    poly: &[Xy],
    p: Xy,
) -> Result<OracleHorizontalSegment, OracleError> {
    let swapped: Vec<Xy> = poly.iter().map(|v| [v[1], v[0]]).collect();
    let s = brute_force_open_segment(&swapped, [p[1], p[0]])?;
    Ok(OracleHorizontalSegment {
        y: p[1],
        x_left: s.y_low,
        x_right: s.y_high,
    })
}

/// Monte-Carlo area estimate with its binomial standard error.
pub fn monte_carlo_area<R: Rng>(poly: &[Xy], samples: usize, rng: &mut R) -> (f64, f64) {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in poly {
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
    }
    let box_area = (x1 - x0) * (y1 - y0);
    let mut inside = 0usize;
    for _ in 0..samples {
        let q = [rng.gen_range(x0..x1), rng.gen_range(y0..y1)];
        if raycast_point_in_polygon(poly, q).inside {
            inside += 1;
        }
    }
    let frac = inside as f64 / samples as f64;
    let stderr = (frac * (1.0 - frac) / samples as f64).sqrt() * box_area;
    (frac * box_area, stderr)
}

/// Edge count of the level-`k` snowflake, by iterating the replacement rule.
pub fn koch_edge_count(level: u32) -> usize {
    let mut edges = 3usize;
    for _ in 0..level {
        edges *= 4;
    }
    edges
}

/// Area of the level-`k` snowflake on a base triangle of side `side`, from the
/// recurrence `A_{k+1} = A_k + e_k · (s_k²·√3/4) / 9`.
pub fn koch_area_recurrence(level: u32, side: f64) -> f64 {
    let mut area = side * side * 3f64.sqrt() / 4.0;
    let mut edges = 3.0;
    let mut s = side;
    for _ in 0..level {
        area += edges * (s * s * 3f64.sqrt() / 4.0) / 9.0;
        edges *= 4.0;
        s /= 3.0;
    }
    area
}

/// Sum of edge lengths.
pub fn perimeter(poly: &[Xy]) -> f64 {
    edges(poly)
        .map(|(_, a, b)| ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt())
        .sum()
}

/// A random simple polygon with `n` vertices, counterclockwise.
///
/// Half of the draws are star-shaped (sorted angles, random radii); the other
/// half start from random points and remove crossings with 2-opt moves, which
/// gives non-star shapes. Every result is passed through [`simplicity_check`].
pub fn random_simple_polygon<R: Rng>(rng: &mut R, n: usize) -> Vec<Xy> {
    assert!(n >= 3);
    loop {
        let candidate = if rng.gen_bool(0.5) {
            star_polygon(rng, n)
        } else {
            match untangled_polygon(rng, n) {
                Some(p) => p,
                None => continue,
            }
        };
        if simplicity_check(&candidate).simple && shoelace_area(&candidate) > 1e-3 {
            let mut p = candidate;
            if signed_area(&p) < 0.0 {
                p.reverse();
            }
            return p;
        }
    }
}

fn star_polygon<R: Rng>(rng: &mut R, n: usize) -> Vec<Xy> {
    let mut angles: Vec<f64> = (0..n)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    angles.sort_by(f64::total_cmp);
    angles
        .into_iter()
        .map(|a| {
            let r = rng.gen_range(0.25..1.0);
            [r * a.cos(), r * a.sin()]
        })
        .collect()
}

fn untangled_polygon<R: Rng>(rng: &mut R, n: usize) -> Option<Vec<Xy>> {
    let mut pts: Vec<Xy> = (0..n)
        .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
        .collect();
    for _ in 0..10_000 {
        let mut changed = false;
        'scan: for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (pts[i], pts[i + 1]);
                let (c, d) = (pts[j], pts[(j + 1) % n]);
                if segment_segment_distance(a, b, c, d) == 0.0 {
                    pts[i + 1..=j].reverse();
                    changed = true;
                    break 'scan;
                }
            }
        }
        if !changed {
            return Some(pts);
        }
    }
    None
}
