//! The compute step must not care how a robot holds its map: rotating,
//! translating or relabelling the snapshot moves the plan along with it.

use conic_forge::formation::compute_destinations;
use conic_forge::geometry::{Point, Similarity};
use proptest::prelude::*;

fn snapshot(max_n: usize) -> impl Strategy<Value = (usize, Vec<Point>)> {
    (2usize..=5).prop_flat_map(move |f| {
        let n = (2 * f + 1)..=(2 * f + 1 + max_n);
        (Just(f), prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), n))
            .prop_map(|(f, xy)| (f, xy.into_iter().map(|(x, y)| Point::new(x, y)).collect()))
    })
}

/// Largest distance between matching candidate sets, robots matched through
/// `order` (local index k is robot `order[k]`).
fn mismatch(a: &[Vec<Point>], b: &[Vec<Point>], order: &[usize], t: &Similarity) -> f64 {
    let mut worst = 0.0f64;
    for (k, &i) in order.iter().enumerate() {
        if a[i].len() != b[k].len() {
            return f64::INFINITY;
        }
        for p in &a[i] {
            let q = t.apply(*p);
            worst = worst.max(b[k].iter().map(|c| c.dist(q)).fold(f64::INFINITY, f64::min));
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn plans_commute_with_rigid_motions(
        (f, pts) in snapshot(6),
        angle in 0.0f64..std::f64::consts::TAU,
        dx in -50.0f64..50.0,
        dy in -50.0f64..50.0,
        perm_seed in any::<u64>(),
    ) {
        let Ok(base) = compute_destinations(&pts, f) else { return Ok(()) };
        let t = Similarity::rigid(angle, Point::new(dx, dy));
        let n = pts.len();
        let mut order: Vec<usize> = (0..n).collect();
        // A cheap deterministic shuffle driven by the seed.
        let mut s = perm_seed | 1;
        for i in (1..n).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            order.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let moved: Vec<Point> = order.iter().map(|&i| t.apply(pts[i])).collect();
        let other = compute_destinations(&moved, f).expect("a valid snapshot stays valid after a rigid motion");
        prop_assert_eq!(base.assignments.is_empty(), other.assignments.is_empty());
        if !base.assignments.is_empty() {
            let scale = 1.0 + pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
            let gap = mismatch(&base.assignments, &other.assignments, &order, &t);
            prop_assert!(gap <= 1e-8 * scale, "candidates moved by {gap}");
        }
    }

    #[test]
    fn candidates_are_distinct_and_unoccupied((f, pts) in snapshot(9)) {
        let Ok(plan) = compute_destinations(&pts, f) else { return Ok(()) };
        let cands: Vec<Point> = plan.candidates().collect();
        for (i, p) in cands.iter().enumerate() {
            for q in &cands[i + 1..] {
                prop_assert!(p.dist(*q) > 1e-9, "two candidates coincide at {:?}", p);
            }
            for r in &pts {
                prop_assert!(p.dist(*r) > 1e-9, "candidate {:?} sits on a robot", p);
            }
        }
    }

    #[test]
    fn scaling_scales_the_plan((f, pts) in snapshot(4), k in 0.01f64..100.0) {
        let Ok(base) = compute_destinations(&pts, f) else { return Ok(()) };
        let t = Similarity { scale: k, ..Similarity::IDENTITY };
        let scaled: Vec<Point> = pts.iter().map(|p| t.apply(*p)).collect();
        let other = compute_destinations(&scaled, f).unwrap();
        let order: Vec<usize> = (0..pts.len()).collect();
        if !base.assignments.is_empty() {
            let scale = k * (1.0 + pts.iter().map(|p| p.norm()).fold(0.0, f64::max));
            prop_assert!(mismatch(&base.assignments, &other.assignments, &order, &t) <= 1e-8 * scale);
        }
    }
}
