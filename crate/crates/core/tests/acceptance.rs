//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the lines always print.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sweepline::classify::{
    classify_point, connectivity_path, ClassifyError, ExteriorIndex, SlabIndex, Verdict,
};
use sweepline::curve::ClosedPolyline;
use sweepline::engine::{
    exterior_sweep, find_root_point, run_sweep, sweeps_equivalent, EnginePolicy, EngineError, Order,
    RayVerdict, SweepState,
};
use sweepline::frontier::validate_boundary;
use sweepline::segment::open_segment_at;
use sweepline::Point2;
use sweepline_oracle::{
    brute_force_open_segment, distance_to_polygon, raycast_point_in_polygon, shoelace_area,
};

const STANDARD: [Order; 3] = [Order::Fifo, Order::Lifo, Order::LargestFirst];

type Outcome = Result<String, String>;

fn sweep(curve: &ClosedPolyline, policy: &EnginePolicy) -> Result<SweepState, EngineError> {
    let root = find_root_point(curve)?;
    run_sweep(curve, root.p, policy)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rectangle_exactness() -> Outcome {
    let curve = square();
    let mut slowest = Duration::ZERO;
    for order in [Order::Fifo, Order::Lifo, Order::LargestFirst, Order::Leftmost] {
        let t0 = Instant::now();
        let s = sweep(&curve, &EnginePolicy::with_order(order)).map_err(|e| e.to_string())?;
        slowest = slowest.max(t0.elapsed());
        if (s.total_area - 1.0).abs() > 1e-9 || s.step_count != 1 || s.frontier_remaining() != 0 || !s.is_maximal() {
            return Err(format!(
                "{order}: area {} steps {} remaining {}",
                s.total_area,
                s.step_count,
                s.frontier_remaining()
            ));
        }
    }
    ensure(
        slowest < Duration::from_millis(10),
        format!("area 1, 1 step, empty frontier for 4 policies; slowest {slowest:?} (< 10 ms)"),
    )
}

fn polygon_area_equivalence() -> Outcome {
    let t0 = Instant::now();
    let polys = random_polygons();
    let mut worst = 0.0f64;
    for (i, (poly, curve)) in polys.iter().enumerate() {
        let s = sweep(curve, &EnginePolicy::default()).map_err(|e| format!("polygon {i}: {e}"))?;
        let rel = relative_error(s.total_area, shoelace_area(poly));
        if rel > 1e-8 {
            return Err(format!("polygon {i}: relative error {rel:e}"));
        }
        worst = worst.max(rel);
    }
    let elapsed = t0.elapsed();
    ensure(
        elapsed < Duration::from_secs(30),
        format!("{} polygons, worst relative error {worst:.2e}; suite {elapsed:.2?} (< 30 s)", polys.len()),
    )
}

fn classification_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut checked, mut disagree) = (0usize, 0usize);
    let mut first = None;
    for (i, (poly, curve)) in random_polygons().iter().enumerate() {
        let s = sweep(curve, &EnginePolicy::default()).map_err(|e| format!("polygon {i}: {e}"))?;
        let index = SlabIndex::build(&s).map_err(|e| e.to_string())?;
        let (bb, eps) = (curve.bbox(), curve.eps());
        let mut n = 0;
        while n < 1000 {
            let q = Point2::new(rng.gen_range(bb.min.x..bb.max.x), rng.gen_range(bb.min.y..bb.max.y));
            if distance_to_polygon(poly, [q.x, q.y]) <= eps {
                continue;
            }
            n += 1;
            let inside = raycast_point_in_polygon(poly, [q.x, q.y]).inside;
            let want = if inside { Verdict::Interior } else { Verdict::Exterior };
            let got = classify_point(&index, curve, q, None).verdict;
            if got != want {
                disagree += 1;
                first.get_or_insert(format!("polygon {i} at {q:?}: {got:?}, oracle {want:?}"));
            }
        }
        checked += n;
    }
    ensure(
        disagree == 0,
        match first {
            None => format!("{checked} points, 100% agreement"),
            Some(f) => format!("{disagree} of {checked} disagree; first {f}"),
        },
    )
}

fn koch_regression() -> Outcome {
    let k4 = koch(4);
    let s = sweep(&k4, &EnginePolicy::default()).map_err(|e| e.to_string())?;
    let rel = relative_error(s.total_area, shoelace_area(&xy(&k4)));
    if !s.is_maximal() || s.frontier_remaining() != 0 || rel > 1e-9 {
        return Err(format!(
            "koch(4): remaining {} relative error {rel:e}",
            s.frontier_remaining()
        ));
    }

    let k6 = koch(6);
    let t0 = Instant::now();
    let s6 = sweep(&k6, &EnginePolicy::default()).map_err(|e| e.to_string())?;
    let run = t0.elapsed();
    let index = SlabIndex::build(&s6).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let bb = k6.bbox();
    let queries: Vec<Point2> = (0..100_000)
        .map(|_| Point2::new(rng.gen_range(bb.min.x..bb.max.x), rng.gen_range(bb.min.y..bb.max.y)))
        .collect();
    let t0 = Instant::now();
    let interior = queries
        .iter()
        .filter(|&&q| classify_point(&index, &k6, q, None).verdict == Verdict::Interior)
        .count();
    let queried = t0.elapsed();
    ensure(
        s6.is_maximal() && run < Duration::from_secs(5) && queried < Duration::from_secs(1),
        format!(
            "koch(4) {} edges, error {rel:.2e}; koch(6) {} edges swept in {run:.2?} (< 5 s), \
             1e5 queries in {queried:.2?} (< 1 s, {interior} interior)",
            k4.len(),
            k6.len()
        ),
    )
}

/// Every standard-policy run over the test curves, plus koch(4) for each policy.
fn standard_runs(check_boundary: bool) -> Vec<(String, Result<SweepState, EngineError>)> {
    let mut out = Vec::new();
    for (name, curve) in test_curves() {
        for order in STANDARD {
            let policy = EnginePolicy {
                check_boundary,
                ..EnginePolicy::with_order(order)
            };
            out.push((format!("{name} {order}"), sweep(&curve, &policy)));
        }
    }
    out
}

fn monotone_inner_measure() -> Outcome {
    let mut runs = 0;
    let mut steps = 0;
    let mut worst_overlap = 0.0f64;
    for (name, run) in standard_runs(false) {
        let s = run.map_err(|e| format!("{name}: {e}"))?;
        let h = &s.area_history;
        for k in 1..h.len() {
            let delta = h[k] - h[k - 1];
            let area = s.tree[k].sweep.area;
            if delta <= 0.0 || (delta - area).abs() > 1e-9 * h[k] {
                return Err(format!("{name} step {k}: delta {delta:e}, sweep area {area:e}"));
            }
        }
        let index = SlabIndex::build(&s).map_err(|e| e.to_string())?;
        let overlap = index.max_overlap() / s.curve.eps();
        if overlap > 1.0 {
            return Err(format!("{name}: trapezoids overlap by {overlap:.1} eps"));
        }
        worst_overlap = worst_overlap.max(overlap);
        runs += 1;
        steps += h.len();
    }
    Ok(format!(
        "{runs} runs, {steps} steps strictly increasing with delta = sweep area; \
         worst trapezoid overlap {worst_overlap:.2} eps"
    ))
}

fn policy_invariance() -> Outcome {
    let mut compared = 0;
    for (name, curve) in test_curves() {
        let states: Vec<SweepState> = STANDARD
            .iter()
            .map(|&o| sweep(&curve, &EnginePolicy::with_order(o)))
            .collect::<Result<_, _>>()
            .map_err(|e| format!("{name}: {e}"))?;
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let same = sweeps_equivalent(&states[a], &states[b], 1000, 11).map_err(|e| format!("{name}: {e}"))?;
            if !same {
                return Err(format!("{name}: {} and {} differ", STANDARD[a], STANDARD[b]));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} policy pairs equivalent (area and 1000 samples each)"))
}

fn boundary_validity() -> Outcome {
    let (mut runs, mut checks) = (0, 0);
    for (name, run) in standard_runs(true) {
        let s = run.map_err(|e| format!("{name}: {e}"))?;
        if s.boundary_checks != s.step_count {
            return Err(format!("{name}: {} checks for {} steps", s.boundary_checks, s.step_count));
        }
        // the per-step checks are incremental; finish with a full one
        let full = validate_boundary(&s.curve, &s.frontier);
        if !full.pass(s.curve.eps()) {
            return Err(format!("{name}: final boundary {full:?}"));
        }
        runs += 1;
        checks += s.boundary_checks;
    }
    Ok(format!("{checks} boundary validations over {runs} runs, all clean"))
}

fn connectivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut paths, mut samples, mut max_turns) = (0, 0usize, 0);
    for (name, curve) in test_curves() {
        let s = sweep(&curve, &EnginePolicy::default()).map_err(|e| format!("{name}: {e}"))?;
        let index = SlabIndex::build(&s).map_err(|e| e.to_string())?;
        let bb = curve.bbox();
        let mut interior = || loop {
            let q = Point2::new(rng.gen_range(bb.min.x..bb.max.x), rng.gen_range(bb.min.y..bb.max.y));
            if classify_point(&index, &curve, q, None).verdict == Verdict::Interior {
                return q;
            }
        };
        let spacing = 100.0 * curve.eps();
        for _ in 0..100 {
            let (a, b) = (interior(), interior());
            let path = match connectivity_path(&s, &index, a, b) {
                Ok(p) => p,
                Err(ClassifyError::NoPath) => return Err(format!("{name}: NoPath from {a:?} to {b:?}")),
                Err(e) => return Err(format!("{name}: {e}")),
            };
            if !path.is_axis_parallel() {
                return Err(format!("{name}: path is not axis-parallel"));
            }
            for leg in path.waypoints.windows(2) {
                let len = leg[0].distance(leg[1]);
                let n = ((len / spacing).ceil() as usize).clamp(1, 200);
                for j in 0..=n {
                    let t = j as f64 / n as f64;
                    let q = Point2::new(
                        leg[0].x + t * (leg[1].x - leg[0].x),
                        leg[0].y + t * (leg[1].y - leg[0].y),
                    );
                    samples += 1;
                    let v = classify_point(&index, &curve, q, None).verdict;
                    if v != Verdict::Interior {
                        return Err(format!("{name}: waypoint sample {q:?} is {v:?}"));
                    }
                }
            }
            max_turns = max_turns.max(path.turns());
            paths += 1;
        }
    }
    Ok(format!("{paths} paths, {samples} samples all interior, zero NoPath; most turns {max_turns}"))
}

fn exterior_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst, mut total, mut outside_total) = (1.0f64, 0, 0);
    for (i, (poly, curve)) in random_polygons().iter().enumerate() {
        let root = find_root_point(curve).map_err(|e| e.to_string())?;
        let policy = EnginePolicy::default();
        let s = run_sweep(curve, root.p, &policy).map_err(|e| e.to_string())?;
        let index = SlabIndex::build(&s).map_err(|e| e.to_string())?;
        let ext = exterior_sweep(curve, root.p, &policy).map_err(|e| format!("polygon {i}: {e}"))?;
        let ext = ExteriorIndex::new(&ext).map_err(|e| e.to_string())?;
        let bb = curve.bbox();
        let w = 0.5 * bb.width().max(bb.height());
        let (mut agree, mut n) = (0, 0);
        while n < 100 {
            // alternate between the bbox itself and a box around it
            let pad = if n % 2 == 0 { 0.0 } else { w };
            let q = Point2::new(
                rng.gen_range(bb.min.x - pad..bb.max.x + pad),
                rng.gen_range(bb.min.y - pad..bb.max.y + pad),
            );
            let o = raycast_point_in_polygon(poly, [q.x, q.y]);
            if o.inside || distance_to_polygon(poly, [q.x, q.y]) <= curve.eps() {
                continue;
            }
            n += 1;
            let v = classify_point(&index, curve, q, Some(&ext)).verdict;
            if !bb.contains(q) {
                outside_total += 1;
                if v != Verdict::Exterior {
                    return Err(format!("polygon {i}: {q:?} outside the bbox classified {v:?}"));
                }
            }
            agree += usize::from(v == Verdict::Exterior);
        }
        total += n;
        worst = worst.min(agree as f64 / n as f64);
    }
    ensure(
        worst >= 0.99,
        format!(
            "{total} exterior samples, worst per-polygon agreement {:.1}%, {outside_total} outside the bbox all Exterior",
            100.0 * worst
        ),
    )
}

fn ray_guard() -> Outcome {
    let policy = EnginePolicy {
        order: Order::Leftmost,
        extension_cap: Some(0.5),
        ..EnginePolicy::default()
    };
    let s = run_sweep(&square(), Point2::new(0.5, 0.5), &policy).map_err(|e| e.to_string())?;
    let first = s
        .ray_diagnostics
        .iter()
        .find(|d| d.verdict == RayVerdict::NonTerminatingSuspected)
        .map(|d| d.at_step);
    match first {
        Some(at) if at <= 64 && (s.total_area - 1.0).abs() <= 1e-9 && s.is_maximal() => {}
        _ => {
            return Err(format!(
                "capped square: suspicion at {first:?}, area {}",
                s.total_area
            ))
        }
    }
    let mut runs = 0;
    for (name, run) in standard_runs(false) {
        let st = run.map_err(|e| format!("{name}: {e}"))?;
        if !st.ray_diagnostics.is_empty() {
            return Err(format!("{name}: {} suspicions", st.ray_diagnostics.len()));
        }
        runs += 1;
    }
    Ok(format!(
        "capped square flagged at step {}, remediated to area 1; {runs} standard runs with zero suspicions",
        first.unwrap()
    ))
}

fn open_segment_equivalence() -> Outcome {
    let mut curves: Vec<_> = random_polygons().into_iter().collect();
    for level in 2..=4 {
        let k = koch(level);
        curves.push((xy(&k), k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 10_000 {
        let (poly, curve) = &curves[rng.gen_range(0..curves.len())];
        let bb = curve.bbox();
        let w = 0.1 * bb.width();
        let q = Point2::new(rng.gen_range(bb.min.x - w..bb.max.x + w), rng.gen_range(bb.min.y - w..bb.max.y + w));
        let Ok(want) = brute_force_open_segment(poly, [q.x, q.y]) else {
            continue;
        };
        let got = open_segment_at(curve, q).map_err(|e| format!("{q:?}: {e}"))?;
        n += 1;
        let end = |g: f64, w: Option<f64>| match w {
            Some(w) => (g - w).abs(),
            None if g.is_infinite() => 0.0,
            None => f64::INFINITY,
        };
        let err = end(got.y_low, want.y_low).max(end(got.y_high, want.y_high)) / curve.eps();
        if err > 1.0 {
            return Err(format!("{q:?}: got {got:?}, oracle {want:?}"));
        }
        worst = worst.max(err);
    }
    Ok(format!("{n} queries, worst endpoint error {worst:.3} eps"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("rectangle exactness", rectangle_exactness),
        ("polygon area equivalence", polygon_area_equivalence),
        ("classification oracle equivalence", classification_equivalence),
        ("koch regression", koch_regression),
        ("monotone inner measure", monotone_inner_measure),
        ("policy invariance", policy_invariance),
        ("boundary validity", boundary_validity),
        ("connectivity", connectivity),
        ("exterior agreement", exterior_agreement),
        ("ray guard", ray_guard),
        ("open-segment equivalence", open_segment_equivalence),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    panic::set_hook(Box::new(|_| {}));
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2}. {name}: {detail} [{:.1?}]", i + 1, t0.elapsed());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
