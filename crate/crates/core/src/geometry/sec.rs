use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    fn from_two(a: Point, b: Point) -> Circle {
        Circle { center: a.midpoint(b), radius: 0.5 * a.dist(b) }
    }

    /// Circumcircle, or `None` for (near) collinear input.
    fn from_three(a: Point, b: Point, c: Point) -> Option<Circle> {
        let (ab, ac) = (b - a, c - a);
        let d = 2.0 * ab.cross(ac);
        if d.abs() <= 1e-300 {
            return None;
        }
        let (bb, cc) = (ab.dot(ab), ac.dot(ac));
        let u = Point::new((ac.y * bb - ab.y * cc) / d, (ab.x * cc - ac.x * bb) / d);
        let center = a + u;
        // Use the largest of the three distances so the circle is closed over
        // all defining points despite rounding.
        let radius = center.dist(a).max(center.dist(b)).max(center.dist(c));
        Some(Circle { center, radius })
    }

    pub fn contains(&self, p: Point) -> bool {
        p.dist(self.center) <= self.radius * (1.0 + 1e-12) + 1e-15
    }
}

/// Circle through or enclosing two/three boundary points; collinear triples
/// fall back to the widest pair.
fn circle_with_boundary(boundary: &[Point]) -> Circle {
    match boundary {
        [a] => Circle { center: *a, radius: 0.0 },
        [a, b] => Circle::from_two(*a, *b),
        [a, b, c] => Circle::from_three(*a, *b, *c).unwrap_or_else(|| {
            let pairs = [(*a, *b), (*a, *c), (*b, *c)];
            let (p, q) = pairs.into_iter().max_by(|x, y| x.0.dist(x.1).total_cmp(&y.0.dist(y.1))).unwrap();
            Circle::from_two(p, q)
        }),
        _ => unreachable!("boundary holds 1..=3 points"),
    }
}

/// Minimum-radius circle containing every point (iterative Welzl).
///
/// The iteration order is the input order, so the result is deterministic.
pub fn smallest_enclosing_circle(points: &[Point]) -> Result<Circle> {
    if points.is_empty() {
        return Err(Error::InvalidInput("smallest enclosing circle of an empty set".into()));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("non-finite point".into()));
    }
    let mut c = Circle { center: points[0], radius: 0.0 };
    for i in 1..points.len() {
        if c.contains(points[i]) {
            continue;
        }
        c = circle_with_boundary(&[points[i]]);
        for j in 0..i {
            if c.contains(points[j]) {
                continue;
            }
            c = circle_with_boundary(&[points[i], points[j]]);
            for k in 0..j {
                if !c.contains(points[k]) {
                    c = circle_with_boundary(&[points[i], points[j], points[k]]);
                }
            }
        }
    }
    Ok(c)
}
