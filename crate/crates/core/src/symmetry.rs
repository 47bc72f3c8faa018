//! Symmetry detection and the total order of asymmetric configurations.

use std::cmp::Ordering as CmpOrdering;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{centroid, diameter, smallest_enclosing_circle, Point};

/// Absolute tolerance after scaling the point set to unit size.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// A line given by a point on it and its direction angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub point: Point,
    pub angle: f64,
}

impl Axis {
    pub fn dir(&self) -> Point {
        Point::from_polar(1.0, self.angle)
    }

    pub fn reflect(&self, p: Point) -> Point {
        p.reflect(self.point, self.dir())
    }

    /// Signed distance, positive on the left of the direction.
    pub fn side(&self, p: Point) -> f64 {
        self.dir().cross(p - self.point)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SymmetryClass {
    Asymmetric,
    Reflective { axis: Axis, k_on_axis: usize },
    Rotational { center: Point, order: usize },
}

impl SymmetryClass {
    pub fn is_asymmetric(&self) -> bool {
        matches!(self, SymmetryClass::Asymmetric)
    }
}

/// Ranks `1..=n` indexed like the input points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ordering {
    pub ranks: Vec<usize>,
}

impl Ordering {
    /// Point indices sorted by rank.
    pub fn by_rank(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.ranks.len()).collect();
        idx.sort_by_key(|&i| self.ranks[i]);
        idx
    }
}

fn maps_onto(points: &[Point], f: impl Fn(Point) -> Point) -> bool {
    points.iter().all(|&p| {
        let image = f(p);
        points.iter().any(|q| q.dist(image) < SYMMETRY_TOL)
    })
}

/// Richest symmetry of a point set; rotation wins over reflection.
pub fn detect_symmetry(points: &[Point]) -> SymmetryClass {
    if points.len() < 2 {
        return SymmetryClass::Asymmetric;
    }
    let c = centroid(points);
    let d = diameter(points);
    if d == 0.0 {
        return SymmetryClass::Asymmetric;
    }
    let q: Vec<Point> = points.iter().map(|&p| (p - c) * (1.0 / d)).collect();
    let p0 = *q.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
    let r0 = p0.norm();
    let same_radius: Vec<Point> = q.iter().copied().filter(|p| (p.norm() - r0).abs() < SYMMETRY_TOL).collect();

    let mut best_angle: Option<f64> = None;
    for &other in &same_radius {
        if other.dist(p0) < SYMMETRY_TOL {
            continue;
        }
        let theta = (other.angle() - p0.angle()).rem_euclid(TAU);
        if maps_onto(&q, |p| p.rotated(theta)) && best_angle.is_none_or(|b| theta < b) {
            best_angle = Some(theta);
        }
    }
    if let Some(theta) = best_angle {
        let order = (TAU / theta).round() as usize;
        if order >= 2 {
            return SymmetryClass::Rotational { center: c, order };
        }
    }

    for &other in &same_radius {
        let dir = if other.dist(p0) < SYMMETRY_TOL {
            p0
        } else if (p0 + other).norm() < SYMMETRY_TOL {
            p0.perp()
        } else {
            p0 + other
        };
        if maps_onto(&q, |p| p.reflect(Point::ORIGIN, dir)) {
            let u = dir.normalized();
            let k = q.iter().filter(|p| u.cross(**p).abs() < SYMMETRY_TOL).count();
            return SymmetryClass::Reflective { axis: Axis { point: c, angle: u.angle() }, k_on_axis: k };
        }
    }
    SymmetryClass::Asymmetric
}

fn cmp_tol(a: f64, b: f64) -> CmpOrdering {
    if (a - b).abs() < SYMMETRY_TOL {
        CmpOrdering::Equal
    } else if a < b {
        CmpOrdering::Less
    } else {
        CmpOrdering::Greater
    }
}

/// `(distance to center, view)` where the view lists every point as
/// `(counterclockwise angle from p, distance)`; the center point, if any,
/// gets angle −1 because its direction is undefined.
fn signature(q: &[Point], i: usize) -> (f64, Vec<(f64, f64)>) {
    let p = q[i];
    let rp = p.norm();
    let base = if rp < SYMMETRY_TOL { 0.0 } else { p.angle() };
    let mut view: Vec<(f64, f64)> = q
        .iter()
        .map(|o| {
            let r = o.norm();
            if r < SYMMETRY_TOL || rp < SYMMETRY_TOL {
                return (if r < SYMMETRY_TOL { -1.0 } else { 0.0 }, r);
            }
            let mut gap = (o.angle() - base).rem_euclid(TAU);
            if gap > TAU - SYMMETRY_TOL {
                gap = 0.0;
            }
            (gap, r)
        })
        .collect();
    view.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Snap near-equal gaps together so the radius decides within a group.
    let mut k = 0;
    while k < view.len() {
        let g = view[k].0;
        let mut j = k;
        while j < view.len() && view[j].0 - g < SYMMETRY_TOL {
            view[j].0 = g;
            j += 1;
        }
        view[k..j].sort_by(|a, b| a.1.total_cmp(&b.1));
        k = j;
    }
    (rp, view)
}

fn cmp_signature(a: &(f64, Vec<(f64, f64)>), b: &(f64, Vec<(f64, f64)>)) -> CmpOrdering {
    cmp_tol(a.0, b.0).then_with(|| {
        for (x, y) in a.1.iter().zip(&b.1) {
            let c = cmp_tol(x.0, y.0).then_with(|| cmp_tol(x.1, y.1));
            if c != CmpOrdering::Equal {
                return c;
            }
        }
        CmpOrdering::Equal
    })
}

/// Ranks by view signature about the smallest-enclosing-circle center.
///
/// Works for any configuration without rotational symmetry (mirror images
/// differ by handedness); ties raise [`Error::SymmetricConfiguration`].
pub fn rank_by_signature(points: &[Point]) -> Result<Ordering> {
    if points.is_empty() {
        return Ok(Ordering { ranks: vec![] });
    }
    let sec = smallest_enclosing_circle(points)?;
    let scale = if sec.radius > 0.0 { 1.0 / sec.radius } else { 1.0 };
    let q: Vec<Point> = points.iter().map(|&p| (p - sec.center) * scale).collect();
    let sigs: Vec<_> = (0..q.len()).map(|i| signature(&q, i)).collect();
    let mut ranks = vec![1; q.len()];
    for i in 0..q.len() {
        for j in 0..q.len() {
            if i == j {
                continue;
            }
            match cmp_signature(&sigs[j], &sigs[i]) {
                CmpOrdering::Less => ranks[i] += 1,
                CmpOrdering::Equal => return Err(Error::SymmetricConfiguration),
                CmpOrdering::Greater => {}
            }
        }
    }
    let mut seen = vec![false; q.len()];
    for &r in &ranks {
        if r > q.len() || std::mem::replace(&mut seen[r - 1], true) {
            return Err(Error::SymmetricConfiguration);
        }
    }
    Ok(Ordering { ranks })
}

/// Signature ranks that tolerate ties: robots with equal views share a
/// rank, one more than the number of strictly smaller views. Unlike an
/// index tie-break this is the same in every frame.
pub fn signature_ranks(points: &[Point]) -> Result<Vec<usize>> {
    let sec = smallest_enclosing_circle(points)?;
    let scale = if sec.radius > 0.0 { 1.0 / sec.radius } else { 1.0 };
    let q: Vec<Point> = points.iter().map(|&p| (p - sec.center) * scale).collect();
    let sigs: Vec<_> = (0..q.len()).map(|i| signature(&q, i)).collect();
    Ok((0..q.len())
        .map(|i| 1 + (0..q.len()).filter(|&j| cmp_signature(&sigs[j], &sigs[i]) == CmpOrdering::Less).count())
        .collect())
}

/// Total order of an asymmetric configuration.
pub fn order_robots(points: &[Point]) -> Result<Ordering> {
    if !detect_symmetry(points).is_asymmetric() {
        return Err(Error::SymmetricConfiguration);
    }
    rank_by_signature(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn square_is_rotational_order_four() {
        let s = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        match detect_symmetry(&s) {
            SymmetryClass::Rotational { center, order } => {
                assert_eq!(order, 4);
                assert!(center.dist(Point::new(0.5, 0.5)) < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kite_is_reflective() {
        let s = pts(&[(-1.0, 0.0), (1.0, 0.0), (0.0, 5.0), (0.0, 2.0)]);
        match detect_symmetry(&s) {
            SymmetryClass::Reflective { axis, k_on_axis } => {
                assert_eq!(k_on_axis, 2);
                assert!(axis.dir().x.abs() < 1e-12);
                assert!(axis.point.x.abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn generic_quadruple_is_asymmetric() {
        let s = pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 2.0), (3.0, 3.0)]);
        assert_eq!(detect_symmetry(&s), SymmetryClass::Asymmetric);
        // Brute force: no axis through any pair midpoint/point pair and no
        // rotation about any candidate center maps the set onto itself.
        for i in 0..4 {
            for j in 0..4 {
                let m = s[i].midpoint(s[j]);
                for k in 0..4 {
                    if s[k].dist(m) < 1e-12 {
                        continue;
                    }
                    let dir = s[k] - m;
                    assert!(!maps_onto(&s, |p| p.reflect(m, dir)));
                    assert!(!maps_onto(&s, |p| p.reflect(m, dir.perp())));
                }
                for angle in [std::f64::consts::PI, TAU / 3.0, TAU / 4.0] {
                    assert!(!maps_onto(&s, |p| m + (p - m).rotated(angle)));
                }
            }
        }
    }

    #[test]
    fn ordering_examples() {
        let s = pts(&[(0.0, 0.0), (10.0, 0.0), (0.0, 1.0)]);
        let a = order_robots(&s).unwrap();
        assert_eq!(a, order_robots(&s).unwrap());
        let mut sorted = a.ranks.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 3]);
        let moved: Vec<Point> = s.iter().map(|p| p.rotated(37f64.to_radians()) + Point::new(3.0, -2.0)).collect();
        assert_eq!(order_robots(&moved).unwrap(), a);
        let square = pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(order_robots(&square), Err(Error::SymmetricConfiguration));
    }

    #[test]
    fn mirror_images_are_ranked_by_handedness() {
        let s = pts(&[(-1.0, 0.0), (1.0, 0.0), (0.0, 5.0), (0.0, 2.0)]);
        let r = rank_by_signature(&s).unwrap();
        assert_ne!(r.ranks[0], r.ranks[1]);
    }
}
