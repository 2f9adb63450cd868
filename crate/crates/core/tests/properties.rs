mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sweepline::classify::SlabIndex;
use sweepline::curve::ClosedPolyline;
use sweepline::engine::{find_root_point, run_sweep, EnginePolicy, Order, SweepState};
use sweepline::frontier::validate_boundary;
use sweepline::segment::open_segment_at;
use sweepline::Point2;
use sweepline_oracle::{
    brute_force_open_segment, distance_to_polygon, random_simple_polygon, shoelace_area, Xy,
};

fn polygon(seed: u64, n: usize) -> (Vec<Xy>, ClosedPolyline) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let poly = random_simple_polygon(&mut rng, n);
    let curve = polyline(&poly);
    (poly, curve)
}

fn run(curve: &ClosedPolyline, order: Order, check_boundary: bool) -> SweepState {
    let root = find_root_point(curve).unwrap();
    let policy = EnginePolicy {
        check_boundary,
        ..EnginePolicy::with_order(order)
    };
    run_sweep(curve, root.p, &policy).unwrap()
}

fn order() -> impl Strategy<Value = Order> {
    prop_oneof![Just(Order::Fifo), Just(Order::Lifo), Just(Order::LargestFirst)]
}

fn points(curve: &ClosedPolyline, seed: u64, count: usize) -> Vec<Point2> {
    let bb = curve.bbox();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Point2::new(rng.gen_range(bb.min.x..bb.max.x), rng.gen_range(bb.min.y..bb.max.y)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn area_matches_shoelace(seed in any::<u64>(), n in 4usize..16, order in order()) {
        let (poly, curve) = polygon(seed, n);
        let s = run(&curve, order, false);
        let exact = shoelace_area(&poly);
        prop_assert!(relative_error(s.total_area, exact) <= 1e-8, "{} vs {exact}", s.total_area);
    }

    #[test]
    fn area_grows_by_each_sweep(seed in any::<u64>(), n in 4usize..16, order in order()) {
        let (_, curve) = polygon(seed, n);
        let s = run(&curve, order, false);
        prop_assert_eq!(s.area_history.len(), s.tree.len());
        for (k, pair) in s.area_history.windows(2).enumerate() {
            let delta = pair[1] - pair[0];
            prop_assert!(delta > 0.0);
            prop_assert!((delta - s.tree[k + 1].sweep.area).abs() <= 1e-9 * s.total_area);
        }
    }

    #[test]
    fn every_splice_keeps_a_valid_boundary(seed in any::<u64>(), n in 4usize..16, order in order()) {
        let (_, curve) = polygon(seed, n);
        let s = run(&curve, order, true);
        prop_assert_eq!(s.boundary_checks, s.step_count);
        let full = validate_boundary(&s.curve, &s.frontier);
        prop_assert!(full.pass(curve.eps()), "{:?}", full);
    }

    #[test]
    fn slab_index_agrees_with_scan(seed in any::<u64>(), n in 4usize..16) {
        let (_, curve) = polygon(seed, n);
        let s = run(&curve, Order::LargestFirst, false);
        let index = SlabIndex::build(&s).unwrap();
        prop_assert!(index.max_overlap() <= curve.eps());
        for q in points(&curve, seed, 200) {
            prop_assert_eq!(index.find(q, 0.0), index.find_linear(q, 0.0), "{:?}", q);
        }
    }

    #[test]
    fn nearest_edge_is_nearest(seed in any::<u64>(), n in 4usize..24) {
        let (poly, curve) = polygon(seed, n);
        for q in points(&curve, seed ^ 1, 100) {
            let (_, got) = curve.nearest_edge(q).unwrap();
            let want = distance_to_polygon(&poly, [q.x, q.y]);
            prop_assert!((got - want).abs() <= 1e-12 * curve.bbox().diagonal(), "{q:?}: {got} vs {want}");
        }
    }

    #[test]
    fn open_segment_matches_brute_force(seed in any::<u64>(), n in 4usize..24) {
        let (poly, curve) = polygon(seed, n);
        for q in points(&curve, seed ^ 2, 50) {
            let Ok(want) = brute_force_open_segment(&poly, [q.x, q.y]) else {
                continue;
            };
            let got = open_segment_at(&curve, q).unwrap();
            let end = |g: f64, w: Option<f64>| match w {
                Some(w) => (g - w).abs(),
                None if g.is_infinite() => 0.0,
                None => f64::INFINITY,
            };
            prop_assert!(end(got.y_low, want.y_low) <= curve.eps(), "{q:?}");
            prop_assert!(end(got.y_high, want.y_high) <= curve.eps(), "{q:?}");
        }
    }
}
