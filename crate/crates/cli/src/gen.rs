//! Rejection-sampling scenario generator.
//!
//! Each mode builds a candidate in a convenient local frame, places it in the
//! world with a random similarity, shuffles the robot order, and keeps it
//! only if the classifier agrees with the mode and the model assumptions
//! hold.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use conic_forge::classifier::{classify_configuration, ConfigClass, TypeISubtype};
use conic_forge::formation::compute_destinations;
use conic_forge::geometry::{
    in_convex_position, smallest_enclosing_circle, Conic, Point, Similarity,
};
use conic_forge::sim::{Scenario, ScenarioOptions};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Upper bound on rejected candidates per scenario.
pub const MAX_ATTEMPTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[serde(rename = "typeO")]
    TypeO,
    #[serde(rename = "typeI_asym")]
    TypeIAsym,
    #[serde(rename = "typeI_reflective")]
    TypeIReflective,
    #[serde(rename = "typeI_rotational")]
    TypeIRotational,
    Terminal,
    Collinear,
    Cocircular,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::TypeO,
        Mode::TypeIAsym,
        Mode::TypeIReflective,
        Mode::TypeIRotational,
        Mode::Terminal,
        Mode::Collinear,
        Mode::Cocircular,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::TypeO => "typeO",
            Mode::TypeIAsym => "typeI_asym",
            Mode::TypeIReflective => "typeI_reflective",
            Mode::TypeIRotational => "typeI_rotational",
            Mode::Terminal => "terminal",
            Mode::Collinear => "collinear",
            Mode::Cocircular => "cocircular",
        }
    }

    pub fn supports(self, f: usize) -> bool {
        match self {
            Mode::TypeO | Mode::Terminal => (1..=5).contains(&f),
            Mode::TypeIAsym | Mode::TypeIReflective => (2..=5).contains(&f),
            Mode::TypeIRotational => f == 2 || f == 3,
            Mode::Collinear => (3..=5).contains(&f),
            Mode::Cocircular => f == 4 || f == 5,
        }
    }

    /// Whether `n` robots can take this shape for `f` faults.
    pub fn supports_n(self, f: usize, n: usize) -> bool {
        let base = if f == 1 { n >= 2 } else { n > 2 * f };
        base && !(self == Mode::TypeIRotational && f == 3 && !n.is_multiple_of(3))
            && !(f == 1 && n == 2 && self == Mode::Terminal)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!(
                    "unknown mode {s:?}; expected one of {}",
                    Mode::ALL.map(Mode::name).join(", ")
                )
            })
    }
}

/// Modes exercised by batch runs for `f`.
pub fn modes_for(f: usize) -> Vec<Mode> {
    match f {
        1 => vec![Mode::TypeO],
        2 => vec![
            Mode::TypeO,
            Mode::TypeIAsym,
            Mode::TypeIReflective,
            Mode::TypeIRotational,
        ],
        3 => vec![
            Mode::TypeO,
            Mode::TypeIAsym,
            Mode::TypeIReflective,
            Mode::TypeIRotational,
        ],
        _ => vec![Mode::TypeO, Mode::TypeIAsym, Mode::TypeIReflective],
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("no {mode} scenario for f = {f}, n = {n} after {attempts} attempts")]
    Exhausted {
        mode: Mode,
        f: usize,
        n: usize,
        attempts: usize,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GenOptions {
    /// Crash fewer than `f` robots (at least one).
    pub at_most_f: bool,
}

/// A scenario of the requested shape, reproducible from `seed`.
pub fn generate(
    f: usize,
    n: usize,
    seed: u64,
    mode: Mode,
    options: GenOptions,
) -> Result<Scenario, GenError> {
    if !mode.supports(f) {
        return Err(GenError::Usage(format!(
            "mode {mode} is not available for f = {f}"
        )));
    }
    if f >= 2 && n < 2 * f + 1 {
        return Err(GenError::Usage(format!(
            "at least 2f+1 = {} robots are required for f = {f}",
            2 * f + 1
        )));
    }
    if n < 2 || !mode.supports_n(f, n) {
        return Err(GenError::Usage(format!(
            "mode {mode} cannot place n = {n} robots for f = {f}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(s) = attempt(&mut rng, f, n, seed, mode, options) {
            return Ok(s);
        }
    }
    Err(GenError::Exhausted {
        mode,
        f,
        n,
        attempts: MAX_ATTEMPTS,
    })
}

/// Raw candidate in a local frame: positions, and the robots that the
/// construction put off the main pattern (if any).
struct Draft {
    points: Vec<Point>,
    special: Vec<usize>,
}

fn attempt(
    rng: &mut ChaCha8Rng,
    f: usize,
    n: usize,
    seed: u64,
    mode: Mode,
    options: GenOptions,
) -> Option<Scenario> {
    let draft = match mode {
        Mode::TypeO => Draft {
            points: scatter(rng, n),
            special: vec![],
        },
        Mode::Terminal => {
            let conic = ConicSampler::random_for(rng, f);
            Draft {
                points: conic.sample_many(rng, n)?,
                special: vec![],
            }
        }
        Mode::TypeIAsym => type_i_asym(rng, f, n)?,
        Mode::TypeIReflective => reflective(rng, f, n)?,
        Mode::TypeIRotational => rotational(rng, f, n)?,
        Mode::Collinear => {
            let line = ConicSampler::Line {
                origin: rand_point(rng, 2.0),
                dir: Point::new(1.0, 0.0),
            };
            let mut points = line.sample_many(rng, f)?;
            points.extend(scatter(rng, n - f));
            Draft {
                points,
                special: (0..f).collect(),
            }
        }
        Mode::Cocircular => {
            let circle = ConicSampler::Circle {
                center: rand_point(rng, 2.0),
                radius: rng.gen_range(2.0..4.5),
            };
            let mut points = circle.sample_many(rng, f)?;
            points.extend(scatter(rng, n - f));
            Draft {
                points,
                special: (0..f).collect(),
            }
        }
    };
    if !separated(&draft.points, 0.15) {
        return None;
    }

    let (points, special) = place_in_world(rng, draft);
    let crashed = pick_crashed(rng, f, n, &points, &special, mode, options)?;
    // A terminal configuration never moves, so its symmetry is harmless; every
    // collinear set is mirror-symmetric about its own line.
    let symmetric_allowed = matches!(
        mode,
        Mode::TypeIReflective | Mode::TypeIRotational | Mode::Terminal
    );
    let scenario = Scenario {
        n,
        f,
        positions: points,
        crashed,
        seed,
        options: ScenarioOptions {
            at_most_f: options.at_most_f,
            allow_reflective_initial: symmetric_allowed,
        },
    };
    if scenario.validate().is_err() || !class_matches(&scenario, mode) {
        return None;
    }
    if f >= 2 && !well_conditioned(&scenario) {
        return None;
    }
    Some(scenario)
}

/// Farthest a first-round destination may land, in enclosing radii.
const MAX_REACH: f64 = 1e3;

/// Nearly degenerate special robots (almost collinear, almost a rectangle)
/// ask for a pattern so flat that its grid lands far outside the swarm,
/// where the fixed tolerances stop meaning anything. Such draws are
/// redrawn. Symmetric shapes outside the handled subcases fail here too.
fn well_conditioned(s: &Scenario) -> bool {
    let Ok(plan) = compute_destinations(&s.positions, s.f) else {
        return false;
    };
    let Ok(sec) = smallest_enclosing_circle(&s.positions) else {
        return false;
    };
    plan.assignments
        .iter()
        .flatten()
        .all(|p| p.dist(sec.center) <= MAX_REACH * sec.radius)
}

fn class_matches(s: &Scenario, mode: Mode) -> bool {
    if s.f == 1 {
        return true;
    }
    let Ok(sec) = smallest_enclosing_circle(&s.positions) else {
        return false;
    };
    let unit = Similarity::normalizing(sec.center, sec.radius);
    let q: Vec<Point> = s.positions.iter().map(|p| unit.apply(*p)).collect();
    let Ok(class) = classify_configuration(&q, s.f) else {
        return false;
    };
    match (mode, class) {
        (Mode::TypeO, ConfigClass::TypeO) => true,
        (Mode::Collinear | Mode::Cocircular, c) => !matches!(c, ConfigClass::Terminal { .. }),
        (Mode::Terminal, ConfigClass::Terminal { .. }) => true,
        (
            Mode::TypeIAsym,
            ConfigClass::TypeI {
                subtype: TypeISubtype::Asym,
                off_pattern,
                ..
            },
        ) => off_pattern.len() == s.f,
        (
            Mode::TypeIReflective,
            ConfigClass::TypeI {
                subtype: TypeISubtype::Reflective { .. },
                off_pattern,
                ..
            },
        ) => off_pattern.len() == s.f,
        (
            Mode::TypeIRotational,
            ConfigClass::TypeI {
                subtype: TypeISubtype::Rotational,
                off_pattern,
                ..
            },
        ) => off_pattern.len() == s.f,
        _ => false,
    }
}

fn rand_point(rng: &mut ChaCha8Rng, r: f64) -> Point {
    Point::new(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn scatter(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point> {
    (0..n).map(|_| rand_point(rng, 5.0)).collect()
}

fn separated(points: &[Point], min: f64) -> bool {
    (0..points.len()).all(|i| (i + 1..points.len()).all(|j| points[i].dist(points[j]) >= min))
}

/// No three points close to collinear, so fitted patterns stay reasonable.
fn well_spread(points: &[Point]) -> bool {
    let scale = points
        .iter()
        .flat_map(|a| points.iter().map(move |b| a.dist(*b)))
        .fold(0.0, f64::max);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for k in j + 1..points.len() {
                let area = (points[j] - points[i]).cross(points[k] - points[i]).abs();
                if area < 0.02 * scale * scale {
                    return false;
                }
            }
        }
    }
    true
}

fn place_in_world(rng: &mut ChaCha8Rng, draft: Draft) -> (Vec<Point>, Vec<usize>) {
    let world = Similarity {
        scale: rng.gen_range(0.5..2.0),
        angle: rng.gen_range(0.0..TAU),
        mirrored: false,
        translation: rand_point(rng, 5.0),
    };
    let mut order: Vec<usize> = (0..draft.points.len()).collect();
    order.shuffle(rng);
    let points = order
        .iter()
        .map(|&i| world.apply(draft.points[i]))
        .collect();
    let special = draft
        .special
        .iter()
        .map(|s| order.iter().position(|i| i == s).expect("index present"))
        .collect();
    (points, special)
}

fn pick_crashed(
    rng: &mut ChaCha8Rng,
    f: usize,
    n: usize,
    points: &[Point],
    special: &[usize],
    mode: Mode,
    options: GenOptions,
) -> Option<Vec<usize>> {
    let count = if options.at_most_f && f > 1 {
        rng.gen_range(1..f)
    } else {
        f
    };
    let forced = match mode {
        Mode::Collinear | Mode::Cocircular => true,
        Mode::TypeIAsym | Mode::TypeIReflective | Mode::TypeIRotational => rng.gen_bool(0.5),
        _ => false,
    };
    if forced && count == special.len() {
        let mut c = special.to_vec();
        c.sort_unstable();
        return Some(c);
    }
    if matches!(mode, Mode::Collinear | Mode::Cocircular) {
        // Fewer crashes than special robots: any subset of them.
        let mut c: Vec<usize> = special.choose_multiple(rng, count).copied().collect();
        c.sort_unstable();
        return Some(c);
    }
    for _ in 0..200 {
        let mut c: Vec<usize> = (0..n)
            .collect::<Vec<_>>()
            .choose_multiple(rng, count)
            .copied()
            .collect();
        c.sort_unstable();
        let cp: Vec<Point> = c.iter().map(|&i| points[i]).collect();
        let ok = count < 3 || (in_convex_position(&cp) && well_spread(&cp));
        if ok {
            return Some(c);
        }
    }
    None
}

/// Closed-form parametrizations used to sample points on a conic.
#[derive(Clone, Copy, Debug)]
enum ConicSampler {
    Line {
        origin: Point,
        dir: Point,
    },
    Circle {
        center: Point,
        radius: f64,
    },
    Ellipse {
        center: Point,
        a: f64,
        b: f64,
        axis: Point,
    },
    Parabola {
        vertex: Point,
        axis: Point,
        focal: f64,
    },
    Hyperbola {
        center: Point,
        a: f64,
        b: f64,
        axis: Point,
    },
}

impl ConicSampler {
    fn random_for(rng: &mut ChaCha8Rng, f: usize) -> ConicSampler {
        let axis = Point::from_polar(1.0, rng.gen_range(0.0..TAU));
        let center = rand_point(rng, 1.5);
        match f {
            2 => ConicSampler::Line {
                origin: center,
                dir: axis,
            },
            3 => ConicSampler::Circle {
                center,
                radius: rng.gen_range(2.0..5.0),
            },
            4 => ConicSampler::Parabola {
                vertex: center,
                axis,
                focal: rng.gen_range(0.4..1.5),
            },
            _ => match rng.gen_range(0..3) {
                0 => {
                    let a = rng.gen_range(2.5..5.0);
                    ConicSampler::Ellipse {
                        center,
                        a,
                        b: a * rng.gen_range(0.35..0.85),
                        axis,
                    }
                }
                1 => ConicSampler::Parabola {
                    vertex: center,
                    axis,
                    focal: rng.gen_range(0.4..1.5),
                },
                _ => ConicSampler::Hyperbola {
                    center,
                    a: rng.gen_range(1.0..2.5),
                    b: rng.gen_range(1.0..2.5),
                    axis,
                },
            },
        }
    }

    fn conic(&self) -> Conic {
        match *self {
            ConicSampler::Line { origin, dir } => {
                Conic::line_through(origin, origin + dir).expect("distinct points")
            }
            ConicSampler::Circle { center, radius } => Conic::circle(center, radius),
            ConicSampler::Ellipse { center, a, b, axis } => Conic::ellipse(center, a, b, axis),
            ConicSampler::Parabola {
                vertex,
                axis,
                focal,
            } => Conic::parabola(vertex, axis, focal),
            ConicSampler::Hyperbola { center, a, b, axis } => Conic::hyperbola(center, a, b, axis),
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Point {
        match *self {
            ConicSampler::Line { origin, dir } => origin + dir * rng.gen_range(-5.0..5.0),
            ConicSampler::Circle { center, radius } => {
                center + Point::from_polar(radius, rng.gen_range(0.0..TAU))
            }
            ConicSampler::Ellipse { center, a, b, axis } => {
                let t: f64 = rng.gen_range(0.0..TAU);
                center + axis * (a * t.cos()) + axis.perp() * (b * t.sin())
            }
            ConicSampler::Parabola {
                vertex,
                axis,
                focal,
            } => {
                let y = rng.gen_range(-4.0..4.0);
                vertex + axis * (y * y / (4.0 * focal)) + axis.perp() * y
            }
            ConicSampler::Hyperbola { center, a, b, axis } => {
                let t: f64 = rng.gen_range(-1.4..1.4);
                let branch = if rng.gen_bool(0.8) { 1.0 } else { -1.0 };
                center + axis * (branch * a * t.cosh()) + axis.perp() * (b * t.sinh())
            }
        }
    }

    fn sample_many(&self, rng: &mut ChaCha8Rng, count: usize) -> Option<Vec<Point>> {
        let points: Vec<Point> = (0..count).map(|_| self.sample(rng)).collect();
        separated(&points, 0.15).then_some(points)
    }
}

/// `n − f` robots on a pattern of the class for `f`, `f` robots off it.
fn type_i_asym(rng: &mut ChaCha8Rng, f: usize, n: usize) -> Option<Draft> {
    let k = ConicSampler::random_for(rng, f);
    let mut points = k.sample_many(rng, n - f)?;
    let off: Vec<Point> = if f == 5 {
        // Off robots on a conic of a chosen class, so every f = 5 target
        // class shows up.
        ConicSampler::random_for(rng, 5).sample_many(rng, 5)?
    } else {
        scatter(rng, f)
    };
    let conic = k.conic();
    if off.iter().any(|p| conic.residual(*p) < 0.1)
        || (f >= 3 && !(in_convex_position(&off) && well_spread(&off)))
    {
        return None;
    }
    let special = (points.len()..points.len() + f).collect();
    points.extend(off);
    Some(Draft { points, special })
}

fn mirror_x(p: Point) -> Point {
    Point::new(-p.x, p.y)
}

/// Mirror-symmetric about the y axis: robots on a symmetric pattern plus a
/// symmetric off set.
fn reflective(rng: &mut ChaCha8Rng, f: usize, n: usize) -> Option<Draft> {
    let on = n - f;
    // (pairs on the right half, robots on the axis) for the pattern.
    let mut pattern: Vec<Point> = Vec::new();
    let push_pair = |pattern: &mut Vec<Point>, p: Point| {
        pattern.push(p);
        pattern.push(mirror_x(p));
    };
    let c = rng.gen_range(-2.0..2.0);
    let conic: Conic;
    match f {
        2 => {
            if rng.gen_bool(0.5) {
                // The pattern line is the axis itself.
                conic = Conic::line_through(Point::new(0.0, 0.0), Point::new(0.0, 1.0)).ok()?;
                for _ in 0..on {
                    pattern.push(Point::new(0.0, rng.gen_range(-5.0..5.0)));
                }
            } else {
                conic = Conic::line_through(Point::new(0.0, c), Point::new(1.0, c)).ok()?;
                for _ in 0..on / 2 {
                    push_pair(&mut pattern, Point::new(rng.gen_range(0.2..5.0), c));
                }
                if on % 2 == 1 {
                    pattern.push(Point::new(0.0, c));
                }
            }
        }
        3 => {
            let r = rng.gen_range(2.0..4.5);
            conic = Conic::circle(Point::new(0.0, c), r);
            let axis_count = if on % 2 == 1 {
                1
            } else if rng.gen_bool(0.5) {
                2
            } else {
                0
            };
            for _ in 0..(on - axis_count) / 2 {
                let t: f64 = rng.gen_range(-PI / 2.0 + 0.05..PI / 2.0 - 0.05);
                push_pair(&mut pattern, Point::new(r * t.cos(), c + r * t.sin()));
            }
            for s in [1.0, -1.0].iter().take(axis_count) {
                pattern.push(Point::new(0.0, c + s * r));
            }
        }
        4 => {
            let focal: f64 = rng.gen_range(0.4..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            conic = Conic::parabola(
                Point::new(0.0, c),
                Point::new(0.0, focal.signum()),
                focal.abs(),
            );
            for _ in 0..on / 2 {
                let x: f64 = rng.gen_range(0.2..4.0);
                push_pair(&mut pattern, Point::new(x, c + x * x / (4.0 * focal)));
            }
            if on % 2 == 1 {
                pattern.push(Point::new(0.0, c));
            }
        }
        _ => {
            let kind = rng.gen_range(0..3);
            let (a, b) = (rng.gen_range(1.5..4.0), rng.gen_range(1.0..3.0));
            let upright = rng.gen_bool(0.5);
            let center = Point::new(0.0, c);
            let axis = if upright {
                Point::new(0.0, 1.0)
            } else {
                Point::new(1.0, 0.0)
            };
            conic = match kind {
                0 => Conic::ellipse(center, a, b, axis),
                1 => Conic::parabola(center, Point::new(0.0, 1.0), b * 0.5),
                _ => Conic::hyperbola(center, a * 0.6, b, axis),
            };
            // Points on the pattern from its own shape, mirrored.
            let axis_points: Vec<Point> = match (kind, upright) {
                (0, true) => vec![center + axis * a, center - axis * a],
                (0, false) => vec![center + Point::new(0.0, b), center - Point::new(0.0, b)],
                (1, _) => vec![center],
                (_, true) => vec![center + axis * (a * 0.6), center - axis * (a * 0.6)],
                _ => vec![],
            };
            let axis_count = if on % 2 == 1 { 1 } else { 0 };
            if axis_count > axis_points.len() {
                return None;
            }
            let sampler = match kind {
                0 => ConicSampler::Ellipse { center, a, b, axis },
                1 => ConicSampler::Parabola {
                    vertex: center,
                    axis: Point::new(0.0, 1.0),
                    focal: b * 0.5,
                },
                _ => ConicSampler::Hyperbola {
                    center,
                    a: a * 0.6,
                    b,
                    axis,
                },
            };
            for _ in 0..(on - axis_count) / 2 {
                let mut p = sampler.sample(rng);
                if p.x.abs() < 0.1 {
                    return None;
                }
                if p.x < 0.0 {
                    p = mirror_x(p);
                }
                push_pair(&mut pattern, p);
            }
            pattern.extend(axis_points.into_iter().take(axis_count));
        }
    }
    // Symmetric off set: mirrored pairs plus one robot on the axis for odd f.
    let mut off: Vec<Point> = Vec::new();
    for _ in 0..f / 2 {
        let p = Point::new(rng.gen_range(0.5..5.0), rng.gen_range(-5.0..5.0));
        off.push(p);
        off.push(mirror_x(p));
    }
    if f % 2 == 1 {
        off.push(Point::new(0.0, rng.gen_range(-5.0..5.0)));
    }
    if off.iter().any(|p| conic.residual(*p) < 0.1)
        || (f >= 3 && !in_convex_position(&off))
        || pattern.len() != on
    {
        return None;
    }
    // Two pairs of equal width make a near rectangle whose parabola is
    // unboundedly flat.
    if f >= 4 && (off[0].x - off[2].x).abs() < 0.5 {
        return None;
    }
    let special = (on..n).collect();
    pattern.extend(off);
    Some(Draft {
        points: pattern,
        special,
    })
}

/// Point-symmetric shapes: two lines crossing at the origin (`f = 2`) or
/// two concentric circles with three-fold symmetry (`f = 3`).
fn rotational(rng: &mut ChaCha8Rng, f: usize, n: usize) -> Option<Draft> {
    let on = n - f;
    let mut points = Vec::with_capacity(n);
    if f == 2 {
        let el = Point::from_polar(1.0, rng.gen_range(0.0..TAU));
        let em = el.rotated(rng.gen_range(0.3..PI - 0.3));
        for _ in 0..on / 2 {
            let t = rng.gen_range(0.3..5.0);
            points.push(el * t);
            points.push(el * -t);
        }
        if on % 2 == 1 {
            points.push(Point::ORIGIN);
        }
        let a = rng.gen_range(1.0..5.0);
        points.push(em * a);
        points.push(em * -a);
    } else {
        let rk = rng.gen_range(2.0..5.0);
        let rt = rk
            * if rng.gen_bool(0.5) {
                rng.gen_range(0.35..0.8)
            } else {
                rng.gen_range(1.25..1.8)
            };
        for _ in 0..on / 3 {
            let phi = rng.gen_range(0.0..TAU);
            for i in 0..3 {
                points.push(Point::from_polar(rk, phi + TAU * i as f64 / 3.0));
            }
        }
        let phi = rng.gen_range(0.0..TAU);
        for i in 0..3 {
            points.push(Point::from_polar(rt, phi + TAU * i as f64 / 3.0));
        }
    }
    if points.len() != n {
        return None;
    }
    Some(Draft {
        points,
        special: (on..n).collect(),
    })
}
