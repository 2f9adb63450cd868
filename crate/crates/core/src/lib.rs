//! Interior discovery for simple closed polylines by chains of horizontal
//! sweeps.
//!
//! A run starts from one horizontal segment inside the curve, sweeps it
//! vertically into trapezoids, and keeps starting new sweeps from the
//! vertical pieces of the swept boundary that are off the curve. The union
//! of the sweeps approximates the interior from inside; the exterior is
//! swept the same way after inverting the curve about an interior point.
//!
//! ```
//! use sweepline::curve::{load_curve, CurveSpec};
//! use sweepline::engine::{find_root_point, run_sweep, EnginePolicy};
//!
//! let curve = load_curve(&CurveSpec::Koch { level: 2 }).unwrap();
//! let root = find_root_point(&curve).unwrap();
//! let state = run_sweep(&curve, root.p, &EnginePolicy::default()).unwrap();
//! assert!((state.total_area - curve.area()).abs() < 1e-9 * curve.area());
//! ```

mod edgetree;
mod geom;
mod grid;
pub mod classify;
pub mod curve;
pub mod engine;
pub mod frontier;
pub mod region;
pub mod segment;
pub mod sweep;

pub use geom::{BoundingBox, Line, Point2, EPS_MIN_RELATIVE, EPS_RELATIVE};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/getting-started.md")]
    mod getting_started {}
    #[doc = include_str!("../../../book/src/stepping.md")]
    mod stepping {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/tolerances.md")]
    mod tolerances {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
