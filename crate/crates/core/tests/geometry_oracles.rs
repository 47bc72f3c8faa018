//! Kernel checks against closed forms and brute force.

use std::f64::consts::{SQRT_2, TAU};

use conic_forge::geometry::{
    fit_circle, fit_conic5, fit_line, fit_parabolas, pattern_span, smallest_enclosing_circle, Conic, ConicClass, Point,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_point(rng: &mut ChaCha8Rng, r: f64) -> Point {
    Point::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn unit(rng: &mut ChaCha8Rng) -> Point {
    Point::from_polar(1.0, rng.gen_range(0.0..TAU))
}

#[test]
fn parabola_span_matches_closed_form() {
    let mut rng = rng(11);
    for _ in 0..200 {
        let a: f64 = rng.gen_range(0.05..20.0);
        let vertex = random_point(&mut rng, 50.0);
        let par = Conic::parabola(vertex, unit(&mut rng), a);
        let expected = 2.0 * a * (SQRT_2 + (1.0 + SQRT_2).ln());
        let got = pattern_span(&par).unwrap().length;
        assert!((got - expected).abs() <= 1e-9 * expected, "a = {a}: {got} vs {expected}");
    }
}

/// Smallest circle through every pair (as diameter) and triple that holds
/// all the points.
fn brute_force_radius(points: &[Point]) -> f64 {
    let holds = |c: Point, r: f64| points.iter().all(|p| p.dist(c) <= r * (1.0 + 1e-12) + 1e-12);
    let mut best = f64::INFINITY;
    if points.len() == 1 {
        return 0.0;
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let c = points[i].midpoint(points[j]);
            let r = points[i].dist(points[j]) / 2.0;
            if r < best && holds(c, r) {
                best = r;
            }
            for k in j + 1..points.len() {
                let Ok(circle) = fit_circle(points[i], points[j], points[k]) else { continue };
                let Ok(conic_forge::geometry::ConicShape::Circle { center, radius }) = circle.shape() else { continue };
                if radius < best && holds(center, radius) {
                    best = radius;
                }
            }
        }
    }
    best
}

#[test]
fn enclosing_circle_matches_brute_force() {
    let mut rng = rng(12);
    for case in 0..1000 {
        let k = rng.gen_range(1..=12);
        let pts: Vec<Point> = (0..k).map(|_| random_point(&mut rng, 10.0)).collect();
        let sec = smallest_enclosing_circle(&pts).unwrap();
        let brute = brute_force_radius(&pts);
        assert!((sec.radius - brute).abs() <= 1e-12 * brute.max(1e-300), "case {case}: {} vs {brute}", sec.radius);
        for p in &pts {
            assert!(p.dist(sec.center) <= sec.radius * (1.0 + 1e-12));
        }
    }
}

#[test]
fn line_and_circle_fits_round_trip() {
    let mut rng = rng(13);
    for _ in 0..500 {
        let (p, q) = (random_point(&mut rng, 10.0), random_point(&mut rng, 10.0));
        let line = Conic::line_through(p, q).unwrap();
        let t: f64 = rng.gen_range(-3.0..3.0);
        let (a, b) = (p + (q - p) * t, p + (q - p) * (t + rng.gen_range(0.5..2.0)));
        assert!(fit_line(a, b).unwrap().distance(&line) < 1e-7);

        let center = random_point(&mut rng, 10.0);
        let r = rng.gen_range(0.5..8.0);
        let circle = Conic::circle(center, r);
        let on: Vec<Point> = (0..3).map(|k| center + Point::from_polar(r, 2.1 * k as f64 + rng.gen_range(0.0..0.5))).collect();
        assert!(fit_circle(on[0], on[1], on[2]).unwrap().distance(&circle) < 1e-7);
    }
}

#[test]
fn parabola_fit_recovers_a_sampled_parabola() {
    let mut rng = rng(14);
    let mut checked = 0;
    while checked < 300 {
        let vertex = random_point(&mut rng, 5.0);
        let axis = unit(&mut rng);
        let focal = rng.gen_range(0.3..3.0);
        let par = Conic::parabola(vertex, axis, focal);
        // x = 2 a t, y = a t² in the parabola's own frame.
        let mut ts: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.5..2.5)).collect();
        ts.sort_by(f64::total_cmp);
        if ts.windows(2).any(|w| w[1] - w[0] < 0.3) {
            continue;
        }
        let pts: Vec<Point> =
            ts.iter().map(|t| vertex + axis.perp() * (2.0 * focal * t) + axis * (focal * t * t)).collect();
        let fits = fit_parabolas([pts[0], pts[1], pts[2], pts[3]]).unwrap();
        assert!(fits.iter().any(|c| c.distance(&par) < 1e-7), "no fitted parabola matches");
        for c in &fits {
            assert_eq!(c.class(), ConicClass::Parabola);
            assert!(pts.iter().all(|p| c.residual(*p) < 1e-7));
        }
        checked += 1;
    }
}

#[test]
fn five_point_fit_recovers_ellipses_and_hyperbolas() {
    let mut rng = rng(15);
    for case in 0..400 {
        let center = random_point(&mut rng, 5.0);
        let axis = unit(&mut rng);
        let (a, b): (f64, f64) = (rng.gen_range(1.0..4.0), rng.gen_range(0.5..3.0));
        let (conic, pts): (Conic, Vec<Point>) = if case % 2 == 0 {
            let (major, minor) = (a.max(b) + 0.2, a.min(b));
            let c = Conic::ellipse(center, major, minor, axis);
            let pts = (0..5)
                .map(|k| {
                    let t = TAU * k as f64 / 5.0 + rng.gen_range(0.0..0.6);
                    center + axis * (major * t.cos()) + axis.perp() * (minor * t.sin())
                })
                .collect();
            (c, pts)
        } else {
            let c = Conic::hyperbola(center, a, b, axis);
            let pts = (0..5)
                .map(|k| {
                    let t = -1.5 + 0.7 * k as f64 + rng.gen_range(0.0..0.3);
                    center + axis * (a * t.cosh()) + axis.perp() * (b * t.sinh())
                })
                .collect();
            (c, pts)
        };
        let fit = fit_conic5([pts[0], pts[1], pts[2], pts[3], pts[4]]).unwrap();
        assert_eq!(fit.class(), conic.class(), "case {case}");
        assert!(fit.distance(&conic) < 1e-7, "case {case}: distance {}", fit.distance(&conic));
    }
}
