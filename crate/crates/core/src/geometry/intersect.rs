use nalgebra::DMatrix;

use super::conic::{Conic, ConicClass, ConicShape};
use super::{Point, Similarity};
use crate::error::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-8;
const MERGE_TOL: f64 = 1e-7;

/// Coefficients in ascending degree.
type Poly = Vec<f64>;

fn poly_mul(a: &[f64], b: &[f64]) -> Poly {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Poly {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    out
}

/// Real roots of a polynomial through the eigenvalues of its companion matrix.
fn real_roots(p: &[f64]) -> Vec<f64> {
    let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return vec![];
    }
    let mut coeffs: Vec<f64> = p.iter().map(|c| c / scale).collect();
    while coeffs.len() > 1 && coeffs.last().unwrap().abs() < 1e-13 {
        coeffs.pop();
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return vec![];
    }
    let lead = coeffs[deg];
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -coeffs[i] / lead;
    }
    m.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-6 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect()
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    let (a, b, c) = (a / scale, b / scale, c / scale);
    if a.abs() < 1e-13 {
        return if b.abs() < 1e-13 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -1e-12 {
        return vec![];
    }
    let sq = disc.max(0.0).sqrt();
    if sq == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let q = -0.5 * (b + b.signum() * sq);
    vec![q / a, c / q]
}

fn newton_polish(c1: &Conic, c2: &Conic, mut p: Point) -> Point {
    for _ in 0..20 {
        let (f1, f2) = (c1.eval(p), c2.eval(p));
        let (g1, g2) = (c1.gradient(p), c2.gradient(p));
        let det = g1.cross(g2);
        if det.abs() < 1e-14 * (g1.norm() * g2.norm()).max(1e-300) {
            break;
        }
        // Solve [g1; g2] δ = [f1; f2].
        let dx = (f1 * g2.y - f2 * g1.y) / det;
        let dy = (g1.x * f2 - g2.x * f1) / det;
        let next = Point::new(p.x - dx, p.y - dy);
        let moved = next.dist(p);
        p = next;
        if moved < 1e-16 * (1.0 + p.norm()) {
            break;
        }
    }
    p
}

fn push_unique(out: &mut Vec<Point>, p: Point) {
    if !out.iter().any(|q| q.dist(p) < MERGE_TOL) {
        out.push(p);
    }
}

/// Newton on `F1 = 0, ∇F1 × ∇F2 = 0`, which pins down a tangency point where
/// the plain system is singular.
fn polish_tangency(c1: &Conic, c2: &Conic, mut p: Point) -> Point {
    let system = |q: Point| (c1.eval(q), c1.gradient(q).cross(c2.gradient(q)));
    for _ in 0..30 {
        let (f, g) = system(p);
        let h = 1e-7 * (1.0 + p.norm());
        let (fx, gx) = system(p + Point::new(h, 0.0));
        let (fy, gy) = system(p + Point::new(0.0, h));
        let j = [[(fx - f) / h, (fy - f) / h], [(gx - g) / h, (gy - g) / h]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let dx = (f * j[1][1] - g * j[0][1]) / det;
        let dy = (j[0][0] * g - j[1][0] * f) / det;
        p = Point::new(p.x - dx, p.y - dy);
        if dx.hypot(dy) < 1e-15 * (1.0 + p.norm()) {
            break;
        }
    }
    p
}

/// Near a tangency the accepted set smears into a short run of points that
/// all satisfy both equations to tolerance; collapse each run to one point.
fn merge_tangent_clusters(c1: &Conic, c2: &Conic, pts: Vec<Point>) -> Vec<Point> {
    let mut groups: Vec<Vec<Point>> = Vec::new();
    for p in pts {
        let joined = groups.iter_mut().find(|g| {
            g.iter().any(|q| q.dist(p) < 1e-3 && accept(c1, c2, q.midpoint(p)))
        });
        match joined {
            Some(g) => g.push(p),
            None => groups.push(vec![p]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            if g.len() == 1 {
                return g[0];
            }
            let score = |q: &Point| c1.residual(*q).max(c2.residual(*q));
            let best = *g.iter().min_by(|a, b| score(a).total_cmp(&score(b))).unwrap();
            let refined = polish_tangency(c1, c2, super::centroid(&g));
            if accept(c1, c2, refined) && g.iter().any(|q| q.dist(refined) < 1e-3) {
                refined
            } else {
                best
            }
        })
        .collect()
}

fn accept(c1: &Conic, c2: &Conic, p: Point) -> bool {
    p.is_finite() && c1.residual(p) < RESIDUAL_TOL && c2.residual(p) < RESIDUAL_TOL
}

fn line_line(c1: &Conic, c2: &Conic) -> Vec<Point> {
    let [.., a, b, c] = c1.coeffs();
    let [.., d, e, g] = c2.coeffs();
    let det = a * e - b * d;
    if det.abs() < 1e-14 {
        return vec![];
    }
    vec![Point::new((b * g - c * e) / det, (c * d - a * g) / det)]
}

fn line_conic(line: &Conic, other: &Conic) -> Vec<Point> {
    let Ok(ConicShape::Line { point, dir }) = line.shape() else {
        return vec![];
    };
    let [a1, a2, a3, ..] = other.coeffs();
    let quad = a1 * dir.x * dir.x + a2 * dir.y * dir.y + a3 * dir.x * dir.y;
    let lin = other.gradient(point).dot(dir);
    let constant = other.eval(point);
    let mut out = Vec::new();
    for t in quadratic_roots(quad, lin, constant) {
        let p = point + dir * t;
        let p = newton_polish(line, other, p);
        if accept(line, other, p) {
            push_unique(&mut out, p);
        }
    }
    out
}

/// Resultant in `y` of two conics, as a polynomial in `x`.
fn resultant_in_y(c1: &Conic, c2: &Conic) -> Poly {
    // F = a2 y² + (a3 x + a5) y + (a1 x² + a4 x + a6)
    let split = |c: &Conic| {
        let [a1, a2, a3, a4, a5, a6] = c.coeffs();
        (vec![a2], vec![a5, a3], vec![a6, a4, a1])
    };
    let (p2, p1, p0) = split(c1);
    let (q2, q1, q0) = split(c2);
    let m02 = poly_sub(&poly_mul(&p2, &q0), &poly_mul(&q2, &p0));
    let m12 = poly_sub(&poly_mul(&p2, &q1), &poly_mul(&q2, &p1));
    let m01 = poly_sub(&poly_mul(&p1, &q0), &poly_mul(&q1, &p0));
    poly_sub(&poly_mul(&m02, &m02), &poly_mul(&m12, &m01))
}

fn quadric_quadric(c1: &Conic, c2: &Conic) -> Vec<Point> {
    // A fixed, generic rotation keeps the y² coefficients away from zero.
    let mut out = Vec::new();
    for angle in [0.618_033_988_749_895, 1.234_567, 2.683_109] {
        let rot = Similarity::rigid(angle, Point::ORIGIN);
        let (r1, r2) = (c1.transformed(&rot), c2.transformed(&rot));
        if r1.coeffs()[1].abs() < 1e-6 && r2.coeffs()[1].abs() < 1e-6 {
            continue;
        }
        let back = rot.inverse();
        for x in real_roots(&resultant_in_y(&r1, &r2)) {
            let mut ys = Vec::new();
            for c in [&r1, &r2] {
                let [a1, a2, a3, a4, a5, a6] = c.coeffs();
                ys.extend(quadratic_roots(a2, a3 * x + a5, a1 * x * x + a4 * x + a6));
            }
            for y in ys {
                let p = newton_polish(c1, c2, back.apply(Point::new(x, y)));
                if accept(c1, c2, p) {
                    push_unique(&mut out, p);
                }
            }
        }
        break;
    }
    out
}

/// All real intersection points of two distinct conics (at most four).
pub fn intersect_conics(c1: &Conic, c2: &Conic) -> Result<Vec<Point>> {
    if c1.distance(c2) < 1e-12 {
        return Err(Error::IdenticalConics);
    }
    let mut pts = match (c1.class(), c2.class()) {
        (ConicClass::Line, ConicClass::Line) => line_line(c1, c2),
        (ConicClass::Line, _) => line_conic(c1, c2),
        (_, ConicClass::Line) => line_conic(c2, c1),
        _ => quadric_quadric(c1, c2),
    };
    pts = merge_tangent_clusters(c1, c2, pts);
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    Ok(pts)
}
