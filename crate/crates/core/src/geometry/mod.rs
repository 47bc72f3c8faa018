//! Planar primitives: points, similarity transforms, conics, spans and the
//! smallest enclosing circle.

mod conic;
mod intersect;
mod quadrature;
mod sec;
mod span;

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

pub use conic::{classify_conic, fit_circle, fit_conic5, fit_line, fit_parabolas, in_convex_position, on_conic, Conic, ConicClass, ConicShape};
pub use intersect::intersect_conics;
pub use quadrature::integrate;
pub use sec::{smallest_enclosing_circle, Circle};
pub use span::{make_line_span, pattern_span, pattern_span_near, point_at_arc_length, uniform_points, PatternSpan, Walk};

/// Default membership tolerance for [`on_conic`].
pub const ON_CONIC_TOL: f64 = 1e-7;

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point { x: v[0], y: v[1] }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn from_polar(r: f64, angle: f64) -> Self {
        Point::new(r * angle.cos(), r * angle.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Point {
        let n = self.norm();
        Point::new(self.x / n, self.y / n)
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    /// Mirror image across the line through `on` with direction `dir`.
    pub fn reflect(self, on: Point, dir: Point) -> Point {
        let d = dir.normalized();
        let v = self - on;
        let along = d * v.dot(d);
        on + along * 2.0 - v
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

pub fn centroid(points: &[Point]) -> Point {
    let n = points.len() as f64;
    let s = points.iter().fold(Point::ORIGIN, |acc, &p| acc + p);
    Point::new(s.x / n, s.y / n)
}

/// Largest pairwise distance.
pub fn diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

/// `p -> scale * R(angle) * M * p + translation`, where `M` flips the y axis
/// when `mirrored` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub scale: f64,
    pub angle: f64,
    pub mirrored: bool,
    pub translation: Point,
}

impl Default for Similarity {
    fn default() -> Self {
        Similarity::IDENTITY
    }
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        scale: 1.0,
        angle: 0.0,
        mirrored: false,
        translation: Point::ORIGIN,
    };

    pub fn rigid(angle: f64, translation: Point) -> Self {
        Similarity { scale: 1.0, angle, mirrored: false, translation }
    }

    /// Maps `center` to the origin and scales lengths by `1 / radius`.
    pub fn normalizing(center: Point, radius: f64) -> Self {
        let s = 1.0 / radius;
        Similarity { scale: s, angle: 0.0, mirrored: false, translation: center * -s }
    }

    fn linear(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        let k = self.scale;
        let m = if self.mirrored { -1.0 } else { 1.0 };
        [[k * c, -k * s * m], [k * s, k * c * m]]
    }

    pub fn apply(&self, p: Point) -> Point {
        let a = self.linear();
        Point::new(
            a[0][0] * p.x + a[0][1] * p.y + self.translation.x,
            a[1][0] * p.x + a[1][1] * p.y + self.translation.y,
        )
    }

    /// Applies only the linear part (for directions).
    pub fn apply_vector(&self, v: Point) -> Point {
        let a = self.linear();
        Point::new(a[0][0] * v.x + a[0][1] * v.y, a[1][0] * v.x + a[1][1] * v.y)
    }

    pub fn inverse(&self) -> Similarity {
        // (s R M)^-1 = (1/s) M R(-angle); with mirroring, M R(-a) = R(a) M.
        let angle = if self.mirrored { self.angle } else { -self.angle };
        let mut inv = Similarity { scale: 1.0 / self.scale, angle, mirrored: self.mirrored, translation: Point::ORIGIN };
        inv.translation = -inv.apply_vector(self.translation);
        inv
    }

    pub fn then(&self, next: &Similarity) -> Similarity {
        // next(self(p))
        let angle = if next.mirrored { next.angle - self.angle } else { next.angle + self.angle };
        let mut out = Similarity {
            scale: self.scale * next.scale,
            angle,
            mirrored: self.mirrored != next.mirrored,
            translation: Point::ORIGIN,
        };
        out.translation = next.apply(self.translation);
        out
    }

    pub fn matrix(&self) -> nalgebra::Matrix3<f64> {
        let a = self.linear();
        nalgebra::Matrix3::new(
            a[0][0], a[0][1], self.translation.x,
            a[1][0], a[1][1], self.translation.y,
            0.0, 0.0, 1.0,
        )
    }

    pub fn length_scale(&self) -> f64 {
        self.scale
    }
}
