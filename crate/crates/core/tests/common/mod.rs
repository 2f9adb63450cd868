#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sweepline::curve::{koch_generate, load_curve, unit_triangle, ClosedPolyline, CurveSpec};
use sweepline::Point2;
use sweepline_oracle::{random_simple_polygon, Xy};

pub const POLYGON_SEED: u64 = 20_241_016;
pub const POLYGON_COUNT: usize = 200;

pub fn polyline(vertices: &[Xy]) -> ClosedPolyline {
    load_curve(&CurveSpec::Polyline {
        vertices: vertices.to_vec(),
    })
    .unwrap()
}

pub fn xy(curve: &ClosedPolyline) -> Vec<Xy> {
    curve.vertices().iter().map(|p| [p.x, p.y]).collect()
}

pub fn square() -> ClosedPolyline {
    polyline(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
}

pub fn c_shape() -> ClosedPolyline {
    polyline(&[
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

pub fn koch(level: u32) -> ClosedPolyline {
    koch_generate(level, unit_triangle()).unwrap()
}

/// The seeded random polygons: 4 to 24 vertices, cycling.
pub fn random_polygons() -> Vec<(Vec<Xy>, ClosedPolyline)> {
    let mut rng = ChaCha8Rng::seed_from_u64(POLYGON_SEED);
    (0..POLYGON_COUNT)
        .map(|i| {
            let poly = random_simple_polygon(&mut rng, 4 + i % 21);
            let curve = ClosedPolyline::new(poly.iter().map(|&v| Point2::from(v)).collect()).unwrap();
            (poly, curve)
        })
        .collect()
}

/// Named fixed curves plus the random polygons.
pub fn test_curves() -> Vec<(String, ClosedPolyline)> {
    let mut out = vec![
        ("square".to_string(), square()),
        ("c-shape".to_string(), c_shape()),
    ];
    for level in 2..=4 {
        out.push((format!("koch({level})"), koch(level)));
    }
    for (i, (_, c)) in random_polygons().into_iter().enumerate() {
        out.push((format!("polygon {i}"), c));
    }
    out
}

pub fn relative_error(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}
