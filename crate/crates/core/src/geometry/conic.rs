use nalgebra::{Matrix3, SMatrix};
use serde::{Deserialize, Serialize};

use super::{centroid, Point, Similarity};
use crate::error::{Error, Result};

const LINE_TOL: f64 = 1e-12;
const PARABOLA_TOL: f64 = 1e-9;
const CIRCLE_TOL: f64 = 1e-9;
const DEGENERATE_TOL: f64 = 1e-12;
const COLLINEAR_TOL: f64 = 1e-9;
const RANK_TOL: f64 = 1e-10;

/// Classification of a degree-2 locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConicClass {
    Line,
    Circle,
    Ellipse,
    Parabola,
    Hyperbola,
    /// Point conics, line pairs and empty loci.
    Degenerate,
}

impl ConicClass {
    pub fn is_closed(self) -> bool {
        matches!(self, ConicClass::Circle | ConicClass::Ellipse)
    }

    pub fn name(self) -> &'static str {
        match self {
            ConicClass::Line => "line",
            ConicClass::Circle => "circle",
            ConicClass::Ellipse => "ellipse",
            ConicClass::Parabola => "parabola",
            ConicClass::Hyperbola => "hyperbola",
            ConicClass::Degenerate => "degenerate",
        }
    }
}

/// `a1 x² + a2 y² + a3 xy + a4 x + a5 y + a6 = 0`, stored with unit-norm
/// coefficients and the first nonzero coefficient positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conic {
    coeffs: [f64; 6],
    class: ConicClass,
}

/// Geometric parameters of a non-degenerate conic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConicShape {
    Line { point: Point, dir: Point },
    Circle { center: Point, radius: f64 },
    /// `axis` is the unit direction of the major semi-axis.
    Ellipse { center: Point, major: f64, minor: f64, axis: Point },
    /// `axis` points from the vertex into the opening; `focal` is the
    /// vertex-to-focus distance.
    Parabola { vertex: Point, axis: Point, focal: f64 },
    /// `axis` is the unit transverse direction; `a`, `b` the semi-axes.
    Hyperbola { center: Point, a: f64, b: f64, axis: Point },
}

fn normalize(coeffs: &[f64; 6]) -> Result<[f64; 6]> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("non-finite conic coefficient".into()));
    }
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidInput("all conic coefficients are zero".into()));
    }
    let mut out = coeffs.map(|c| c / norm);
    if let Some(first) = out.iter().find(|c| c.abs() > 1e-14) {
        if *first < 0.0 {
            out = out.map(|c| -c);
        }
    }
    Ok(out)
}

/// Eigen-decomposition of `[[a, b], [b, c]]`: `(λ_big, λ_small, v_big)` with
/// `|λ_big| >= |λ_small|`.
fn sym_eigen(a: f64, b: f64, c: f64) -> (f64, f64, Point) {
    let mean = 0.5 * (a + c);
    let r = (0.5 * (a - c)).hypot(b);
    let (l1, l2) = (mean + r, mean - r);
    let (big, small) = if l1.abs() >= l2.abs() { (l1, l2) } else { (l2, l1) };
    let v1 = Point::new(b, big - a);
    let v2 = Point::new(big - c, b);
    let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
    let v = if v.norm() < 1e-300 { Point::new(1.0, 0.0) } else { v.normalized() };
    (big, small, v)
}

fn det3(c: &[f64; 6]) -> f64 {
    let [a1, a2, a3, a4, a5, a6] = *c;
    Matrix3::new(a1, a3 / 2.0, a4 / 2.0, a3 / 2.0, a2, a5 / 2.0, a4 / 2.0, a5 / 2.0, a6).determinant()
}

/// Center of a central conic and the equation's value there.
fn center_and_value(c: &[f64; 6]) -> Option<(Point, f64)> {
    let [a1, a2, a3, a4, a5, a6] = *c;
    let det = a1 * a2 - a3 * a3 / 4.0;
    if det == 0.0 {
        return None;
    }
    // [[a1, a3/2], [a3/2, a2]] x = -[a4/2, a5/2]
    let cx = (-a4 / 2.0 * a2 + a5 / 2.0 * a3 / 2.0) / det;
    let cy = (-a5 / 2.0 * a1 + a4 / 2.0 * a3 / 2.0) / det;
    Some((Point::new(cx, cy), a4 * cx / 2.0 + a5 * cy / 2.0 + a6))
}

/// Discriminant classification of a coefficient vector.
pub fn classify_conic(coeffs: &[f64; 6]) -> Result<ConicClass> {
    let c = normalize(coeffs)?;
    Ok(classify_normalized(&c))
}

fn classify_normalized(c: &[f64; 6]) -> ConicClass {
    let [a1, a2, a3, a4, a5, _] = *c;
    let q = (a1 * a1 + a2 * a2 + a3 * a3).sqrt();
    if q < LINE_TOL {
        return if a4.hypot(a5) > LINE_TOL { ConicClass::Line } else { ConicClass::Degenerate };
    }
    let disc = a3 * a3 - 4.0 * a1 * a2;
    if (disc / (q * q)).abs() < PARABOLA_TOL {
        return if det3(c).abs() < DEGENERATE_TOL { ConicClass::Degenerate } else { ConicClass::Parabola };
    }
    let Some((_, f0)) = center_and_value(c) else {
        return ConicClass::Degenerate;
    };
    // Degeneracy is judged on the coefficients translated to the center.
    if f0.abs() / (q * q + f0 * f0).sqrt() < DEGENERATE_TOL {
        return ConicClass::Degenerate;
    }
    if disc < 0.0 {
        if f0 * (a1 + a2) > 0.0 {
            ConicClass::Degenerate
        } else if ((a1 - a2) / q).abs() < CIRCLE_TOL && (a3 / q).abs() < CIRCLE_TOL {
            ConicClass::Circle
        } else {
            ConicClass::Ellipse
        }
    } else {
        ConicClass::Hyperbola
    }
}

impl Conic {
    pub fn new(coeffs: [f64; 6]) -> Result<Conic> {
        let coeffs = normalize(&coeffs)?;
        Ok(Conic { coeffs, class: classify_normalized(&coeffs) })
    }

    pub fn coeffs(&self) -> [f64; 6] {
        self.coeffs
    }

    pub fn class(&self) -> ConicClass {
        self.class
    }

    pub fn circle(center: Point, radius: f64) -> Conic {
        Conic::new([1.0, 1.0, 0.0, -2.0 * center.x, -2.0 * center.y, center.dot(center) - radius * radius])
            .expect("finite circle")
    }

    pub fn line_through(p: Point, q: Point) -> Result<Conic> {
        fit_line(p, q)
    }

    /// Parabola with the given vertex, unit opening direction and focal length.
    pub fn parabola(vertex: Point, axis: Point, focal: f64) -> Conic {
        // Local frame: Y² = 4 p X, X along the axis.
        Conic::new([0.0, 1.0, 0.0, -4.0 * focal, 0.0, 0.0])
            .expect("finite parabola")
            .transformed(&Similarity::rigid(axis.angle(), vertex))
    }

    pub fn ellipse(center: Point, major: f64, minor: f64, axis: Point) -> Conic {
        Conic::new([1.0 / (major * major), 1.0 / (minor * minor), 0.0, 0.0, 0.0, -1.0])
            .expect("finite ellipse")
            .transformed(&Similarity::rigid(axis.angle(), center))
    }

    pub fn hyperbola(center: Point, a: f64, b: f64, axis: Point) -> Conic {
        Conic::new([1.0 / (a * a), -1.0 / (b * b), 0.0, 0.0, 0.0, -1.0])
            .expect("finite hyperbola")
            .transformed(&Similarity::rigid(axis.angle(), center))
    }

    pub fn eval(&self, p: Point) -> f64 {
        let [a1, a2, a3, a4, a5, a6] = self.coeffs;
        a1 * p.x * p.x + a2 * p.y * p.y + a3 * p.x * p.y + a4 * p.x + a5 * p.y + a6
    }

    pub fn gradient(&self, p: Point) -> Point {
        let [a1, a2, a3, a4, a5, _] = self.coeffs;
        Point::new(2.0 * a1 * p.x + a3 * p.y + a4, 2.0 * a2 * p.y + a3 * p.x + a5)
    }

    /// First-order estimate of the Euclidean distance from `p` to the locus.
    pub fn residual(&self, p: Point) -> f64 {
        let f = self.eval(p);
        let g = self.gradient(p).norm();
        if g > 1e-300 {
            f.abs() / g
        } else if f == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// Image of the locus under `t`.
    pub fn transformed(&self, t: &Similarity) -> Conic {
        let [a1, a2, a3, a4, a5, a6] = self.coeffs;
        let m = Matrix3::new(a1, a3 / 2.0, a4 / 2.0, a3 / 2.0, a2, a5 / 2.0, a4 / 2.0, a5 / 2.0, a6);
        let h_inv = t.inverse().matrix();
        let out = h_inv.transpose() * m * h_inv;
        let coeffs = [
            out[(0, 0)],
            out[(1, 1)],
            out[(0, 1)] + out[(1, 0)],
            out[(0, 2)] + out[(2, 0)],
            out[(1, 2)] + out[(2, 1)],
            out[(2, 2)],
        ];
        // A conic keeps its class under similarities; only re-normalize.
        Conic { coeffs: normalize(&coeffs).expect("similarity preserves nonzero coefficients"), class: self.class }
    }

    /// Distance between normalized coefficient vectors (sign-insensitive).
    pub fn distance(&self, other: &Conic) -> f64 {
        let plus: f64 = self.coeffs.iter().zip(other.coeffs).map(|(a, b)| (a - b) * (a - b)).sum();
        let minus: f64 = self.coeffs.iter().zip(other.coeffs).map(|(a, b)| (a + b) * (a + b)).sum();
        plus.min(minus).sqrt()
    }

    pub fn shape(&self) -> Result<ConicShape> {
        let [a1, a2, a3, a4, a5, a6] = self.coeffs;
        match self.class {
            ConicClass::Degenerate => Err(Error::InvalidInput("degenerate conic has no shape".into())),
            ConicClass::Line => {
                let n = Point::new(a4, a5);
                let n2 = n.dot(n);
                Ok(ConicShape::Line { point: n * (-a6 / n2), dir: n.perp().normalized() })
            }
            ConicClass::Parabola => {
                let (k, _, u) = sym_eigen(a1, a3 / 2.0, a2);
                let v = u.perp();
                let lin = Point::new(a4, a5);
                let (d, e) = (lin.dot(u), lin.dot(v));
                if e.abs() < 1e-300 {
                    return Err(Error::DegenerateInput("parabola without linear term".into()));
                }
                let s0 = -d / (2.0 * k);
                let t0 = -(k * s0 * s0 + d * s0 + a6) / e;
                let vertex = u * s0 + v * t0;
                let axis = if -k / e > 0.0 { v } else { -v };
                Ok(ConicShape::Parabola { vertex, axis, focal: (e / k).abs() / 4.0 })
            }
            ConicClass::Circle | ConicClass::Ellipse | ConicClass::Hyperbola => {
                let (center, f0) = center_and_value(&self.coeffs)
                    .ok_or_else(|| Error::DegenerateInput("conic has no center".into()))?;
                let (l_big, l_small, v_big) = sym_eigen(a1, a3 / 2.0, a2);
                let v_small = v_big.perp();
                match self.class {
                    ConicClass::Circle => {
                        let r = (-f0 / (0.5 * (a1 + a2))).sqrt();
                        Ok(ConicShape::Circle { center, radius: r })
                    }
                    ConicClass::Ellipse => {
                        // Larger eigenvalue magnitude ↔ shorter semi-axis.
                        let minor = (-f0 / l_big).sqrt();
                        let major = (-f0 / l_small).sqrt();
                        Ok(ConicShape::Ellipse { center, major, minor, axis: canonical_dir(v_small) })
                    }
                    _ => {
                        let (transverse, lt, lc) = if -f0 / l_big > 0.0 {
                            (v_big, l_big, l_small)
                        } else {
                            (v_small, l_small, l_big)
                        };
                        let a = (-f0 / lt).sqrt();
                        let b = (f0 / lc).sqrt();
                        Ok(ConicShape::Hyperbola { center, a, b, axis: canonical_dir(transverse) })
                    }
                }
            }
        }
    }

    /// Full latus-rectum chord of a parabola or hyperbola.
    pub fn latus_rectum(&self) -> Option<f64> {
        match self.shape().ok()? {
            ConicShape::Parabola { focal, .. } => Some(4.0 * focal),
            ConicShape::Hyperbola { a, b, .. } => Some(2.0 * b * b / a),
            _ => None,
        }
    }
}

fn canonical_dir(v: Point) -> Point {
    if v.x > 0.0 || (v.x == 0.0 && v.y > 0.0) {
        v
    } else {
        -v
    }
}

/// Estimated geometric distance from `p` to `c` is below `tol`.
pub fn on_conic(p: Point, c: &Conic, tol: f64) -> bool {
    c.residual(p) < tol
}

fn normalized_cross(p: Point, q: Point, r: Point) -> f64 {
    let (a, b) = (q - p, r - p);
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        0.0
    } else {
        a.cross(b) / denom
    }
}

pub(crate) fn collinear(p: Point, q: Point, r: Point) -> bool {
    normalized_cross(p, q, r).abs() < COLLINEAR_TOL
}

pub fn fit_line(p: Point, q: Point) -> Result<Conic> {
    if p.dist(q) <= 1e-14 * (1.0 + p.norm().max(q.norm())) {
        return Err(Error::DegenerateInput("line through coincident points".into()));
    }
    let n = (q - p).perp();
    Conic::new([0.0, 0.0, 0.0, n.x, n.y, -n.dot(p)])
}

pub fn fit_circle(p: Point, q: Point, r: Point) -> Result<Conic> {
    if collinear(p, q, r) {
        return Err(Error::DegenerateInput("circle through collinear points".into()));
    }
    let (b, c) = (q - p, r - p);
    let d = 2.0 * b.cross(c);
    let (bb, cc) = (b.dot(b), c.dot(c));
    let u = Point::new((c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d);
    Ok(Conic::circle(p + u, u.norm()))
}

/// Translation/scale that maps `points` to zero mean and unit RMS radius.
fn conditioning(points: &[Point]) -> Similarity {
    let c = centroid(points);
    let rms = (points.iter().map(|p| p.dist(c).powi(2)).sum::<f64>() / points.len() as f64).sqrt();
    Similarity::normalizing(c, if rms > 0.0 { rms } else { 1.0 })
}

fn convex_position(pts: &[Point]) -> bool {
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if collinear(pts[i], pts[j], pts[k]) {
                    return false;
                }
            }
        }
    }
    // No point inside the triangle of any three others.
    for (l, &p) in pts.iter().enumerate() {
        let others: Vec<Point> = pts.iter().enumerate().filter(|(i, _)| *i != l).map(|(_, q)| *q).collect();
        for i in 0..others.len() {
            for j in i + 1..others.len() {
                for k in j + 1..others.len() {
                    let (a, b, c) = (others[i], others[j], others[k]);
                    let s1 = (b - a).cross(p - a);
                    let s2 = (c - b).cross(p - b);
                    let s3 = (a - c).cross(p - c);
                    if (s1 > 0.0 && s2 > 0.0 && s3 > 0.0) || (s1 < 0.0 && s2 < 0.0 && s3 < 0.0) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Points are vertices of a strictly convex polygon.
pub fn in_convex_position(pts: &[Point]) -> bool {
    pts.len() < 3 || convex_position(pts)
}

fn line_coeffs(a: Point, b: Point) -> [f64; 3] {
    let n = (b - a).perp();
    [n.x, n.y, -n.dot(a)]
}

fn line_product(l: [f64; 3], m: [f64; 3]) -> [f64; 6] {
    let [a, b, c] = l;
    let [d, e, g] = m;
    [a * d, b * e, a * e + b * d, a * g + c * d, b * g + c * e, c * g]
}

fn real_quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    if a.abs() < 1e-12 {
        return if b.abs() < 1e-300 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-12 {
        return vec![];
    }
    let sq = disc.max(0.0).sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Parabolas through four points in convex position, largest latus rectum first.
pub fn fit_parabolas(pts: [Point; 4]) -> Result<Vec<Conic>> {
    if !convex_position(&pts) {
        return Err(Error::DegenerateInput("four points are not in convex position".into()));
    }
    let cond = conditioning(&pts);
    let mut q: Vec<Point> = pts.iter().map(|&p| cond.apply(p)).collect();
    q.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
    // Two line-pair members of the pencil: opposite sides of the quadrilateral.
    let c1 = line_product(line_coeffs(q[0], q[1]), line_coeffs(q[2], q[3]));
    let c2 = line_product(line_coeffs(q[1], q[2]), line_coeffs(q[3], q[0]));
    let (a1, b1, cc1) = (c1[0], c1[2], c1[1]);
    let (a2, b2, cc2) = (c2[0], c2[2], c2[1]);
    let alpha = b2 * b2 - 4.0 * a2 * cc2;
    let beta = 2.0 * b1 * b2 - 4.0 * (a1 * cc2 + a2 * cc1);
    let gamma = b1 * b1 - 4.0 * a1 * cc1;
    let back = cond.inverse();
    let mut out: Vec<Conic> = Vec::new();
    for lambda in real_quadratic_roots(alpha, beta, gamma) {
        let coeffs: [f64; 6] = std::array::from_fn(|i| c1[i] + lambda * c2[i]);
        let Ok(conic) = Conic::new(coeffs) else { continue };
        if conic.class() != ConicClass::Parabola {
            continue;
        }
        let Ok(ConicShape::Parabola { vertex, axis, focal }) = conic.shape() else { continue };
        let exact = Conic::parabola(vertex, axis, focal).transformed(&back);
        if !out.iter().any(|c| c.distance(&exact) < 1e-9) {
            out.push(exact);
        }
    }
    if out.is_empty() {
        return Err(Error::DegenerateInput("no real parabola through the four points".into()));
    }
    out.sort_by(|a, b| b.latus_rectum().unwrap_or(0.0).total_cmp(&a.latus_rectum().unwrap_or(0.0)));
    Ok(out)
}

/// The unique conic through five points (null space of the 5×6 design matrix).
pub fn fit_conic5(pts: [Point; 5]) -> Result<Conic> {
    let cond = conditioning(&pts);
    let mut m = SMatrix::<f64, 6, 6>::zeros();
    for (i, p) in pts.iter().enumerate() {
        let p = cond.apply(*p);
        let row = [p.x * p.x, p.y * p.y, p.x * p.y, p.x, p.y, 1.0];
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = *v;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::DegenerateInput("svd failed".into()))?;
    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let largest = svd.singular_values[order[5]];
    if svd.singular_values[order[1]] < RANK_TOL * largest {
        return Err(Error::DegenerateInput("five points do not determine a unique conic".into()));
    }
    let null = v_t.row(order[0]);
    let coeffs: [f64; 6] = std::array::from_fn(|i| null[i]);
    let conic = Conic::new(coeffs)?.transformed(&cond.inverse());
    let conic = Conic::new(conic.coeffs())?;
    match conic.class() {
        ConicClass::Ellipse | ConicClass::Circle | ConicClass::Parabola | ConicClass::Hyperbola => Ok(conic),
        other => Err(Error::DegenerateInput(format!("five points lie on a {} conic", other.name()))),
    }
}
