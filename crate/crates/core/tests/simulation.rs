//! End-to-end runs of the simulator on hand-built and random scenarios.

use conic_forge::geometry::Point;
use conic_forge::sim::{run, Scenario, ScenarioOptions, SimConfig, Verdict};
use conic_forge::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scatter(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    (0..n).map(|_| Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).collect()
}

fn scenario(f: usize, positions: Vec<Point>, crashed: Vec<usize>, seed: u64) -> Scenario {
    Scenario { n: positions.len(), f, positions, crashed, seed, options: ScenarioOptions::default() }
}

fn rounds(verdict: &Verdict) -> usize {
    match verdict {
        Verdict::Success { rounds_used } => *rounds_used,
        Verdict::Failure { reason } => panic!("run failed: {reason}"),
    }
}

#[test]
fn too_few_robots_are_rejected_with_the_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for f in 2..=5 {
        for n in f + 1..2 * f + 1 {
            let s = scenario(f, scatter(&mut rng, n), (0..f).collect(), 0);
            let err = s.validate().unwrap_err();
            assert_eq!(err, Error::TooFewRobots { n, f });
            assert!(err.to_string().contains("2f+1"));
        }
        let s = scenario(f, scatter(&mut rng, 2 * f + 1), (0..f).collect(), 0);
        assert!(!matches!(s.validate(), Err(Error::TooFewRobots { .. })));
    }
}

#[test]
fn two_robots_gather_in_one_round() {
    let s = scenario(1, vec![Point::new(0.0, 0.0), Point::new(3.0, 1.0)], vec![1], 0);
    let trace = run(&s, &SimConfig::default());
    assert_eq!(rounds(&trace.verdict), 1);
    assert!(trace.final_positions().iter().all(|p| p.dist(Point::new(3.0, 1.0)) < 1e-12));
}

#[test]
fn gathering_takes_two_rounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for seed in 0..200 {
        let n = rng.gen_range(3..12);
        let s = scenario(1, scatter(&mut rng, n), vec![rng.gen_range(0..n)], seed);
        let trace = run(&s, &SimConfig::default());
        assert!(rounds(&trace.verdict) <= 2, "seed {seed}");
    }
}

#[test]
fn scattered_robots_finish_in_two_rounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 200 {
        let f = rng.gen_range(2..=5);
        let n = rng.gen_range(2 * f + 1..=2 * f + 9);
        let s = scenario(f, scatter(&mut rng, n), (0..f).collect(), done);
        if s.validate().is_err() {
            continue;
        }
        let trace = run(&s, &SimConfig::default());
        assert!(rounds(&trace.verdict) <= 2, "f = {f}, n = {n}");
        assert!(trace.checks.iter().all(|c| c.passed));
        done += 1;
    }
}

#[test]
fn random_frames_leave_the_trace_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    while done < 60 {
        let f = rng.gen_range(2..=5);
        let n = rng.gen_range(2 * f + 1..=2 * f + 9);
        let s = scenario(f, scatter(&mut rng, n), (0..f).collect(), 1000 + done);
        if s.validate().is_err() {
            continue;
        }
        let plain = run(&s, &SimConfig::default());
        let framed = run(&s, &SimConfig { random_frames: true, ..SimConfig::default() });
        assert_eq!(plain.rounds.len(), framed.rounds.len());
        for (a, b) in plain.rounds.iter().zip(&framed.rounds) {
            for (p, q) in a.iter().zip(b) {
                assert!(p.dist(*q) <= 1e-8, "traces diverge by {}", p.dist(*q));
            }
        }
        done += 1;
    }
}

#[test]
fn seven_on_a_line_with_two_crashed_off_it() {
    let mut positions: Vec<Point> = (0..7).map(|k| Point::new(k as f64 * 1.3 + 0.1 * (k * k) as f64, 0.0)).collect();
    positions.push(Point::new(1.0, 2.5));
    positions.push(Point::new(4.5, -1.7));
    let s = scenario(2, positions, vec![7, 8], 0);
    let trace = run(&s, &SimConfig::default());
    assert!(rounds(&trace.verdict) <= 2);
}

#[test]
fn collinear_crashed_robots_settle_on_their_line() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    while done < 50 {
        let n = rng.gen_range(7..=15);
        let mut positions = scatter(&mut rng, n - 3);
        let (a, dir) = (Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), Point::from_polar(1.0, rng.gen_range(0.0..6.3)));
        for t in [-4.0, rng.gen_range(-2.0..2.0), 4.5] {
            positions.push(a + dir * t);
        }
        let s = scenario(3, positions, vec![n - 3, n - 2, n - 1], done);
        if s.validate().is_err() {
            continue;
        }
        let trace = run(&s, &SimConfig::default());
        assert!(rounds(&trace.verdict) <= 3, "seed {done}");
        done += 1;
    }
}
