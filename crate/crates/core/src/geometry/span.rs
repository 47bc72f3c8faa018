use std::f64::consts::TAU;

use super::conic::{fit_line, Conic, ConicClass, ConicShape};
use super::quadrature::integrate;
use super::Point;
use crate::error::{Error, Result};

const ARC_REL_TOL: f64 = 1e-13;

/// Parametric form of the curve underlying a span.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Curve {
    /// `a + t (b - a)`, `t ∈ [0, 1]`.
    Segment { a: Point, b: Point },
    /// Counterclockwise from angle 0.
    Circle { center: Point, radius: f64 },
    /// `center + major cos t · axis + minor sin t · perp(axis)`.
    Ellipse { center: Point, major: f64, minor: f64, axis: Point },
    /// `vertex + σ · side + σ²/(4p) · open`, with `side = perp(open)`.
    Parabola { vertex: Point, open: Point, focal: f64 },
    /// `center + a cosh τ · axis + b sinh τ · perp(axis)`, the branch that
    /// `axis` points to. Orienting the axis by the branch keeps the order of
    /// the endpoints independent of the sign the decomposition happened to
    /// return.
    Hyperbola { center: Point, a: f64, b: f64, axis: Point },
}

impl Curve {
    fn point(&self, t: f64) -> Point {
        match *self {
            Curve::Segment { a, b } => a + (b - a) * t,
            Curve::Circle { center, radius } => center + Point::from_polar(radius, t),
            Curve::Ellipse { center, major, minor, axis } => {
                center + axis * (major * t.cos()) + axis.perp() * (minor * t.sin())
            }
            Curve::Parabola { vertex, open, focal } => vertex + open.perp() * t + open * (t * t / (4.0 * focal)),
            Curve::Hyperbola { center, a, b, axis } => {
                center + axis * (a * t.cosh()) + axis.perp() * (b * t.sinh())
            }
        }
    }

    fn speed(&self, t: f64) -> f64 {
        match *self {
            Curve::Segment { a, b } => a.dist(b),
            Curve::Circle { radius, .. } => radius,
            Curve::Ellipse { major, minor, .. } => (major * t.sin()).hypot(minor * t.cos()),
            Curve::Parabola { focal, .. } => (1.0f64).hypot(t / (2.0 * focal)),
            Curve::Hyperbola { a, b, .. } => (a * t.sinh()).hypot(b * t.cosh()),
        }
    }

    /// Parameter of the curve point nearest `p` (exact for points on the curve).
    fn param_of(&self, p: Point) -> f64 {
        match *self {
            Curve::Segment { a, b } => {
                let d = b - a;
                (p - a).dot(d) / d.dot(d)
            }
            Curve::Circle { center, .. } => (p - center).angle().rem_euclid(TAU),
            Curve::Ellipse { center, major, minor, axis } => {
                let v = p - center;
                (v.dot(axis.perp()) / minor).atan2(v.dot(axis) / major).rem_euclid(TAU)
            }
            Curve::Parabola { vertex, open, .. } => (p - vertex).dot(open.perp()),
            Curve::Hyperbola { center, b, axis, .. } => ((p - center).dot(axis.perp()) / b).asinh(),
        }
    }

    fn closed(&self) -> bool {
        matches!(self, Curve::Circle { .. } | Curve::Ellipse { .. })
    }
}

/// A finite stretch of a conic: the whole curve for circles and ellipses,
/// the part between two endpoints otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternSpan {
    pub conic: Conic,
    /// Empty for closed curves; `[first, second]` for open ones.
    pub endpoints: Vec<Point>,
    pub length: f64,
    curve: Curve,
    t0: f64,
    t1: f64,
}

/// Where arc distances are measured from, and in which direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Walk {
    /// Open spans: from the first endpoint toward the second.
    FromFirst,
    /// Open spans: from the second endpoint toward the first.
    FromSecond,
    /// Closed spans: from (the projection of) `from`, counterclockwise or not.
    Around { from: Point, ccw: bool },
}

impl PatternSpan {
    fn build(conic: Conic, curve: Curve, t0: f64, t1: f64) -> PatternSpan {
        let mut span = PatternSpan { conic, endpoints: Vec::new(), length: 0.0, curve, t0, t1 };
        span.length = span.arc_between(t0, t1);
        if !curve.closed() {
            span.endpoints = vec![curve.point(t0), curve.point(t1)];
        }
        span
    }

    pub fn is_closed(&self) -> bool {
        self.curve.closed()
    }

    pub fn class(&self) -> ConicClass {
        self.conic.class()
    }

    fn arc_between(&self, ta: f64, tb: f64) -> f64 {
        match self.curve {
            Curve::Segment { a, b } => (tb - ta) * a.dist(b),
            Curve::Circle { radius, .. } => (tb - ta) * radius,
            curve => integrate(|t| curve.speed(t), ta, tb, ARC_REL_TOL),
        }
    }

    /// Parameter whose arc coordinate (from `t0`) equals `s`.
    fn param_at(&self, s: f64) -> f64 {
        match self.curve {
            Curve::Segment { .. } => s / self.length,
            Curve::Circle { radius, .. } => s / radius,
            curve => {
                let (mut lo, mut hi) = (self.t0, self.t1);
                let mut t = self.t0 + (self.t1 - self.t0) * (s / self.length).clamp(0.0, 1.0);
                let mut s_at = self.arc_between(self.t0, t);
                for _ in 0..100 {
                    let err = s_at - s;
                    if err.abs() <= 1e-14 * self.length.max(1.0) {
                        break;
                    }
                    if err > 0.0 {
                        hi = t;
                    } else {
                        lo = t;
                    }
                    let mut next = t - err / curve.speed(t);
                    if !(next > lo && next < hi) {
                        next = 0.5 * (lo + hi);
                    }
                    if (next - t).abs() <= 1e-16 * (1.0 + t.abs()) {
                        break;
                    }
                    // Incremental update keeps each quadrature short.
                    s_at += self.arc_between(t, next);
                    t = next;
                }
                t
            }
        }
    }

    /// Arc coordinate of `p` measured from the span origin in parameter
    /// direction. Closed spans return a value in `[0, length)`; open spans may
    /// return values outside `[0, length]` for points beyond the endpoints.
    pub fn arc_position(&self, p: Point) -> f64 {
        let t = self.curve.param_of(p);
        let s = self.arc_between(self.t0, t);
        if self.is_closed() {
            s.rem_euclid(self.length)
        } else {
            s
        }
    }

    /// Point at arc coordinate `s` (closed spans wrap).
    pub fn point_at(&self, s: f64) -> Point {
        let s = if self.is_closed() { s.rem_euclid(self.length) } else { s };
        self.curve.point(self.param_at(s))
    }

    /// Arc coordinate of the point reached after walking `d` along `walk`.
    pub fn walk_to_arc(&self, walk: &Walk, d: f64) -> f64 {
        match *walk {
            Walk::FromFirst if self.is_closed() => d.rem_euclid(self.length),
            Walk::FromFirst => d,
            Walk::FromSecond if self.is_closed() => (-d).rem_euclid(self.length),
            Walk::FromSecond => self.length - d,
            Walk::Around { from, ccw } => {
                let base = self.arc_position(from);
                let s = if ccw { base + d } else { base - d };
                if self.is_closed() {
                    s.rem_euclid(self.length)
                } else {
                    s
                }
            }
        }
    }

    /// Distance travelled along `walk` to reach `p` (closed spans: `[0, length)`).
    pub fn walk_distance(&self, walk: &Walk, p: Point) -> f64 {
        let s = self.arc_position(p);
        match *walk {
            Walk::FromFirst => s,
            Walk::FromSecond if self.is_closed() => (-s).rem_euclid(self.length),
            Walk::FromSecond => self.length - s,
            Walk::Around { from, ccw } => {
                let base = self.arc_position(from);
                let d = if ccw { s - base } else { base - s };
                if self.is_closed() {
                    d.rem_euclid(self.length)
                } else {
                    d
                }
            }
        }
    }

    /// Arc separation of two arc coordinates (shorter way round for closed spans).
    pub fn arc_gap(&self, s1: f64, s2: f64) -> f64 {
        let d = (s1 - s2).abs();
        if self.is_closed() {
            let d = d.rem_euclid(self.length);
            d.min(self.length - d)
        } else {
            d
        }
    }

    /// Points at walk distances `phase + k u` for `k = 0..m`.
    pub fn grid(&self, walk: &Walk, m: usize, u: f64, phase: f64) -> Result<Vec<Point>> {
        (0..m)
            .map(|k| {
                let d = phase + k as f64 * u;
                point_at_arc_length(self, walk, d)
            })
            .collect()
    }

    /// Polyline approximation for drawing.
    pub fn polyline(&self, segments: usize) -> Vec<Point> {
        let segments = segments.max(1);
        (0..=segments)
            .map(|i| self.curve.point(self.t0 + (self.t1 - self.t0) * i as f64 / segments as f64))
            .collect()
    }
}

/// Span of a circle, ellipse, parabola or hyperbola. Parabolas and
/// hyperbolas are cut at their latus-rectum chord; hyperbolas use the branch
/// on the positive side of the transverse axis.
pub fn pattern_span(conic: &Conic) -> Result<PatternSpan> {
    pattern_span_near(conic, &[])
}

/// As [`pattern_span`], picking the hyperbola branch that holds most of `near`.
pub fn pattern_span_near(conic: &Conic, near: &[Point]) -> Result<PatternSpan> {
    match conic.class() {
        ConicClass::Line | ConicClass::Degenerate => Err(Error::InvalidInput(format!(
            "{} conic has no intrinsic span",
            conic.class().name()
        ))),
        _ => match conic.shape()? {
            ConicShape::Circle { center, radius } => {
                Ok(PatternSpan::build(*conic, Curve::Circle { center, radius }, 0.0, TAU))
            }
            ConicShape::Ellipse { center, major, minor, axis } => {
                Ok(PatternSpan::build(*conic, Curve::Ellipse { center, major, minor, axis }, 0.0, TAU))
            }
            ConicShape::Parabola { vertex, axis, focal } => {
                let curve = Curve::Parabola { vertex, open: axis, focal };
                Ok(PatternSpan::build(*conic, curve, -2.0 * focal, 2.0 * focal))
            }
            ConicShape::Hyperbola { center, a, b, axis } => {
                let plus = near.iter().filter(|p| (**p - center).dot(axis) > 0.0).count();
                let branch = if near.is_empty() || 2 * plus >= near.len() { 1.0 } else { -1.0 };
                let tmax = (b / a).asinh();
                Ok(PatternSpan::build(*conic, Curve::Hyperbola { center, a, b, axis: axis * branch }, -tmax, tmax))
            }
            ConicShape::Line { .. } => unreachable!("line handled above"),
        },
    }
}

/// Segment span from `a` to `b`.
pub fn make_line_span(a: Point, b: Point) -> Result<PatternSpan> {
    let conic = fit_line(a, b)?;
    Ok(PatternSpan::build(conic, Curve::Segment { a, b }, 0.0, 1.0))
}

/// Point at walk distance `s` along the span.
pub fn point_at_arc_length(span: &PatternSpan, walk: &Walk, s: f64) -> Result<Point> {
    let arc = span.walk_to_arc(walk, s);
    if !span.is_closed() {
        let slack = 1e-9 * span.length;
        if arc < -slack || arc > span.length + slack {
            return Err(Error::OutOfRange { s, length: span.length });
        }
        return Ok(span.point_at(arc.clamp(0.0, span.length)));
    }
    Ok(span.point_at(arc))
}

/// `m` points spaced `length / m` apart, the first at walk distance `phase`.
pub fn uniform_points(span: &PatternSpan, walk: &Walk, m: usize, phase: f64) -> Result<Vec<Point>> {
    if m == 0 {
        return Err(Error::InvalidInput("uniform grid needs at least one point".into()));
    }
    span.grid(walk, m, span.length / m as f64, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn unit_circle() -> PatternSpan {
        pattern_span(&Conic::circle(Point::ORIGIN, 1.0)).unwrap()
    }

    #[test]
    fn span_lengths() {
        assert!((unit_circle().length - TAU).abs() < 1e-12);
        let par = Conic::parabola(Point::ORIGIN, Point::new(1.0, 0.0), 1.0);
        let closed_form = 2.0 * (SQRT_2 + (1.0 + SQRT_2).ln());
        assert!((pattern_span(&par).unwrap().length - closed_form).abs() < 1e-9 * closed_form);
        let ell = Conic::ellipse(Point::ORIGIN, 2.0, 1.0, Point::new(1.0, 0.0));
        assert!((pattern_span(&ell).unwrap().length - 9.688448220547675).abs() < 1e-9);
        assert!(matches!(pattern_span(&fit_line(Point::ORIGIN, Point::new(1.0, 0.0)).unwrap()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn line_spans() {
        assert_eq!(make_line_span(Point::ORIGIN, Point::new(3.0, 4.0)).unwrap().length, 5.0);
        assert_eq!(make_line_span(Point::ORIGIN, Point::new(1.0, 0.0)).unwrap().length, 1.0);
        assert_eq!(make_line_span(Point::new(-1.0, -1.0), Point::new(2.0, 3.0)).unwrap().length, 5.0);
        assert!(matches!(make_line_span(Point::ORIGIN, Point::ORIGIN), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn arc_length_examples() {
        let c = unit_circle();
        let walk = Walk::Around { from: Point::new(1.0, 0.0), ccw: true };
        assert!(point_at_arc_length(&c, &walk, FRAC_PI_2).unwrap().dist(Point::new(0.0, 1.0)) < 1e-12);
        let l = make_line_span(Point::ORIGIN, Point::new(10.0, 0.0)).unwrap();
        assert!(point_at_arc_length(&l, &Walk::FromFirst, 2.5).unwrap().dist(Point::new(2.5, 0.0)) < 1e-12);
        assert!(matches!(point_at_arc_length(&l, &Walk::FromFirst, 10.5), Err(Error::OutOfRange { .. })));
        let par = pattern_span(&Conic::new([1.0, 0.0, 0.0, 0.0, -1.0, 0.0]).unwrap()).unwrap();
        let mid = point_at_arc_length(&par, &Walk::FromFirst, par.length / 2.0).unwrap();
        assert!(mid.norm() < 1e-10);
    }

    #[test]
    fn uniform_examples() {
        let c = unit_circle();
        let pts = uniform_points(&c, &Walk::Around { from: Point::new(1.0, 0.0), ccw: true }, 4, 0.0).unwrap();
        let expect = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (p, (x, y)) in pts.iter().zip(expect) {
            assert!(p.dist(Point::new(x, y)) < 1e-12);
        }
        let l = make_line_span(Point::ORIGIN, Point::new(8.0, 0.0)).unwrap();
        let pts = uniform_points(&l, &Walk::FromFirst, 4, 1.0).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert!(p.dist(Point::new(1.0 + 2.0 * i as f64, 0.0)) < 1e-12);
        }
        let par = pattern_span(&Conic::new([1.0, 0.0, 0.0, 0.0, -1.0, 0.0]).unwrap()).unwrap();
        let pts = uniform_points(&par, &Walk::FromFirst, 2, par.length / 4.0).unwrap();
        assert!((pts[0].x + pts[1].x).abs() < 1e-10 && (pts[0].y - pts[1].y).abs() < 1e-10);
        assert!(matches!(uniform_points(&l, &Walk::FromFirst, 0, 0.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn arc_position_inverts_point_at() {
        let hyp = Conic::hyperbola(Point::new(0.5, -1.0), 1.5, 0.8, Point::from_polar(1.0, 0.3));
        let ell = Conic::ellipse(Point::new(0.5, -1.0), 1.5, 0.8, Point::from_polar(1.0, 0.3));
        for conic in [hyp, ell] {
            let span = pattern_span(&conic).unwrap();
            for k in 0..10 {
                let s = span.length * k as f64 / 10.0;
                let p = span.point_at(s);
                assert!(conic.residual(p) < 1e-9);
                assert!(span.arc_gap(span.arc_position(p), s) < 1e-9 * span.length);
            }
        }
        let c = unit_circle();
        let walk = Walk::Around { from: Point::new(0.0, 1.0), ccw: false };
        assert!((c.walk_distance(&walk, Point::new(1.0, 0.0)) - FRAC_PI_2).abs() < 1e-12);
        assert!((c.walk_distance(&walk, Point::new(-1.0, 0.0)) - 3.0 * FRAC_PI_2).abs() < 1e-12);
        assert!((c.arc_gap(0.1, TAU - 0.1) - 0.2).abs() < 1e-12 && c.arc_gap(0.0, PI) <= PI);
    }

    #[test]
    fn hyperbola_branch_follows_points() {
        let hyp = Conic::hyperbola(Point::ORIGIN, 1.0, 1.0, Point::new(1.0, 0.0));
        let left = [Point::new(-1.0, 0.0), Point::new(-2.0f64.sqrt(), 1.0)];
        let span = pattern_span_near(&hyp, &left).unwrap();
        assert!(span.endpoints.iter().all(|p| p.x < 0.0));
        // Latus-rectum endpoints sit at x = ±c, y = ±b²/a.
        let c = 2.0f64.sqrt();
        assert!(span.endpoints.iter().all(|p| (p.x.abs() - c).abs() < 1e-12 && (p.y.abs() - 1.0).abs() < 1e-12));
    }
}
