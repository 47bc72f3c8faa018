//! Configuration taxonomy (Terminal / Type I / Type O), uniformity tests
//! and fault identification from uniform grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    fit_circle, fit_conic5, fit_line, fit_parabolas, make_line_span, pattern_span_near, smallest_enclosing_circle,
    Conic, ConicClass, PatternSpan, Point, ON_CONIC_TOL,
};
use crate::symmetry::{detect_symmetry, signature_ranks, SymmetryClass};

/// Arc-length tolerance for grid membership, relative to the configuration scale.
pub const GRID_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeISubtype {
    Asym,
    Reflective { k: usize },
    Rotational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConfigClass {
    /// The pattern is complete. `conic` is `None` for the single-point
    /// pattern of `f = 1`.
    Terminal { conic: Option<Conic> },
    /// `off_pattern` robots are off `on_pattern_conic`; `defining` holds the
    /// `f` robots the next target passes through.
    TypeI {
        subtype: TypeISubtype,
        off_pattern: Vec<usize>,
        defining: Vec<usize>,
        on_pattern_conic: Conic,
    },
    TypeO,
}

impl ConfigClass {
    pub fn label(&self) -> &'static str {
        match self {
            ConfigClass::Terminal { .. } => "terminal",
            ConfigClass::TypeI { subtype: TypeISubtype::Asym, .. } => "typeI_asym",
            ConfigClass::TypeI { subtype: TypeISubtype::Reflective { .. }, .. } => "typeI_reflective",
            ConfigClass::TypeI { subtype: TypeISubtype::Rotational, .. } => "typeI_rotational",
            ConfigClass::TypeO => "typeO",
        }
    }
}

/// Pattern classes a completed configuration may take for `f` faults,
/// before lower-order degeneration.
pub fn pattern_classes(f: usize) -> &'static [ConicClass] {
    match f {
        2 => &[ConicClass::Line],
        3 => &[ConicClass::Circle],
        4 => &[ConicClass::Parabola],
        5 => &[ConicClass::Ellipse, ConicClass::Circle, ConicClass::Parabola, ConicClass::Hyperbola],
        _ => &[],
    }
}

pub fn all_collinear(points: &[Point]) -> bool {
    if points.len() < 3 {
        return true;
    }
    let (i, j) = farthest_pair(points);
    let (a, b) = (points[i], points[j]);
    let len = a.dist(b);
    len == 0.0 || points.iter().all(|p| ((b - a).cross(*p - a) / len).abs() < ON_CONIC_TOL * len.max(1.0))
}

pub fn concyclic(points: &[Point]) -> Option<Conic> {
    if points.len() < 3 || all_collinear(points) {
        return None;
    }
    let (i, j) = farthest_pair(points);
    // Third point: the one farthest from the line through the first two.
    let k = (0..points.len())
        .max_by(|&x, &y| {
            let d = |m: usize| (points[j] - points[i]).cross(points[m] - points[i]).abs();
            d(x).total_cmp(&d(y))
        })
        .unwrap();
    let c = fit_circle(points[i], points[j], points[k]).ok()?;
    let scale = points[i].dist(points[j]).max(1.0);
    points.iter().all(|p| c.residual(*p) < ON_CONIC_TOL * scale).then_some(c)
}

pub(crate) fn farthest_pair(points: &[Point]) -> (usize, usize) {
    let mut best = (0, 0, -1.0);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = points[i].dist(points[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

/// Target pattern through the defining robots, degenerating to a line
/// (collinear, three or more points) or a circle (co-circular, four or more).
pub fn fit_target(points: &[Point]) -> Result<Conic> {
    match points.len() {
        2 => fit_line(points[0], points[1]),
        n if n >= 3 && all_collinear(points) => {
            let (i, j) = farthest_pair(points);
            fit_line(points[i], points[j])
        }
        3 => fit_circle(points[0], points[1], points[2]),
        4 => {
            let quad = [points[0], points[1], points[2], points[3]];
            match concyclic(points) {
                Some(c) => Ok(symmetric_parabola(quad).unwrap_or(c)),
                None => Ok(fit_parabolas(quad)?[0]),
            }
        }
        5 => fit_conic5([points[0], points[1], points[2], points[3], points[4]]),
        n => Err(Error::InvalidInput(format!("cannot fit a target through {n} points"))),
    }
}

/// An isosceles trapezoid is co-circular but also carries exactly one
/// parabola sharing its mirror axis; that parabola is the pattern. Nearly
/// rectangular trapezoids, whose parabola runs off to infinity, keep the
/// circle.
fn symmetric_parabola(quad: [Point; 4]) -> Option<Conic> {
    let SymmetryClass::Reflective { axis, k_on_axis: 0 } = detect_symmetry(&quad) else { return None };
    let d = axis.dir();
    // (distance from the axis, position along it), one entry per mirror pair.
    let mut pairs: Vec<(f64, f64)> = quad.iter().map(|p| (d.cross(*p - axis.point).abs(), (*p - axis.point).dot(d))).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let (s1, t1) = pairs[0];
    let (s2, t2) = pairs[3];
    let width = s1 * s1 - s2 * s2;
    if width.abs() < 1e-6 * s2 * s2 || (t1 - t2).abs() < 1e-9 * s2 {
        return None;
    }
    let a = (t1 - t2) / width;
    let vertex = axis.point + d * (t1 - a * s1 * s1);
    Some(Conic::parabola(vertex, d * a.signum(), 1.0 / (4.0 * a.abs())))
}

/// Span used to measure arc positions on a pattern holding `members`.
/// Lines get the segment between the extreme members.
pub fn span_for(conic: &Conic, members: &[Point]) -> Result<PatternSpan> {
    if conic.class() == ConicClass::Line {
        if members.len() < 2 {
            return Err(Error::InvalidInput("a line span needs two members".into()));
        }
        let (i, j) = farthest_pair(members);
        let (a, b) = if (members[i].x, members[i].y) <= (members[j].x, members[j].y) {
            (members[i], members[j])
        } else {
            (members[j], members[i])
        };
        make_line_span(a, b)
    } else {
        pattern_span_near(conic, members)
    }
}

/// A uniform grid along a span: arc positions `anchor + k u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub u: f64,
    pub anchor: f64,
    /// Per input point: does it sit on the grid?
    pub members: Vec<bool>,
}

impl Grid {
    pub fn count(&self) -> usize {
        self.members.iter().filter(|m| **m).count()
    }

    /// `max index − min index + 1` over members.
    pub fn extent(&self, arcs: &[f64]) -> usize {
        let idx: Vec<i64> = arcs
            .iter()
            .zip(&self.members)
            .filter(|(_, m)| **m)
            .map(|(s, _)| ((s - self.anchor) / self.u).round() as i64)
            .collect();
        match (idx.iter().min(), idx.iter().max()) {
            (Some(lo), Some(hi)) => (hi - lo + 1) as usize,
            _ => 0,
        }
    }

    fn same_as(&self, other: &Grid, tol: f64) -> bool {
        (self.u - other.u).abs() <= tol && self.members == other.members
    }

    /// `self` is `other` with every `k`-th slot kept, `k ≥ 2`.
    fn coarsens(&self, other: &Grid, tol: f64) -> bool {
        let k = self.u / other.u;
        k > 1.5
            && (k - k.round()).abs() * other.u <= tol
            && self.members.iter().zip(&other.members).all(|(s, o)| !*s || *o)
    }
}

/// Membership tolerance never exceeds this share of the spacing, so a grid
/// squeezed far below the size of the swarm does not pick up every robot.
const GRID_REL_TOL: f64 = 1e-4;

fn grid_members(arcs: &[f64], anchor: f64, u: f64, tol: f64) -> Vec<bool> {
    let tol = tol.min(GRID_REL_TOL * u);
    arcs.iter()
        .map(|s| {
            let k = (s - anchor) / u;
            (k - k.round()).abs() * u < tol
        })
        .collect()
}

/// Uniform grid explaining at least `need` of the given arc positions.
///
/// A grid that merely refines another candidate by an integer factor is
/// dropped: it holds everything the coarser one does and threads stray
/// points besides. Among the rest the grid with most members wins, then the
/// finer one, since sparse progressions through a stray point are what
/// compete with the real grid.
///
/// Spacings are inferred from gaps between the first few sorted positions,
/// one pair of which must be on the grid when at most `arcs.len() - need`
/// positions are off it.
pub fn find_grid(span: &PatternSpan, arcs: &[f64], need: usize, max_slots: usize, tol: f64) -> Option<Grid> {
    let n = arcs.len();
    if n < 2 || need < 2 || need > n {
        return None;
    }
    let mut sorted: Vec<f64> = arcs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let probe = (n - need + 2).min(n);
    let mut candidates: Vec<Grid> = Vec::new();
    for a in 0..probe {
        for b in a + 1..probe {
            let delta = sorted[b] - sorted[a];
            if delta <= tol {
                continue;
            }
            for k in 1..=max_slots {
                let mut u = delta / k as f64;
                if span.is_closed() {
                    let m = span.length / u;
                    if (m - m.round()).abs() * u > tol || m.round() as usize > max_slots {
                        continue;
                    }
                    u = span.length / m.round();
                }
                if u <= 2.0 * tol {
                    break;
                }
                let members = grid_members(arcs, sorted[a], u, tol);
                if members.iter().filter(|m| **m).count() < need {
                    continue;
                }
                let grid = Grid { u, anchor: sorted[a], members };
                if !candidates.iter().any(|g| g.same_as(&grid, tol)) {
                    candidates.push(grid);
                }
            }
        }
    }
    let kept: Vec<&Grid> = candidates.iter().filter(|g| !candidates.iter().any(|h| h.coarsens(g, tol))).collect();
    kept.into_iter()
        .max_by(|g, h| g.count().cmp(&h.count()).then(h.u.total_cmp(&g.u)))
        .cloned()
}

fn scale_of(points: &[Point]) -> f64 {
    smallest_enclosing_circle(points).map(|c| c.radius).unwrap_or(1.0).max(1e-12)
}

fn arcs_on(points: &[Point], span: &PatternSpan, tol: f64) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            if span.conic.residual(*p) > tol {
                Err(Error::InvalidInput(format!("point ({}, {}) is not on the pattern", p.x, p.y)))
            } else {
                Ok(span.arc_position(*p))
            }
        })
        .collect()
}

/// Consecutive arc gaps all equal (closed spans include the wrap-around gap).
pub fn is_uniform(points: &[Point], span: &PatternSpan) -> Result<bool> {
    let scale = scale_of(points).max(span.length);
    let mut arcs = arcs_on(points, span, ON_CONIC_TOL * scale)?;
    if arcs.len() < 2 {
        return Ok(true);
    }
    arcs.sort_by(f64::total_cmp);
    let mut gaps: Vec<f64> = arcs.windows(2).map(|w| w[1] - w[0]).collect();
    if span.is_closed() {
        gaps.push(span.length - (arcs[arcs.len() - 1] - arcs[0]));
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    Ok(gaps.iter().all(|g| (g - mean).abs() <= GRID_TOL * mean))
}

/// The points occupy `n` of `m` equally spaced arc positions.
pub fn is_quasi_uniform(points: &[Point], span: &PatternSpan, m: usize) -> Result<bool> {
    let n = points.len();
    if m < n || m > 2 * n.max(1) {
        return Ok(false);
    }
    if n <= 1 {
        return Ok(true);
    }
    let scale = scale_of(points).max(span.length);
    let arcs = arcs_on(points, span, ON_CONIC_TOL * scale)?;
    let tol = GRID_TOL * scale;
    if span.is_closed() {
        let u = span.length / m as f64;
        return Ok(arcs.iter().all(|&a| grid_members(&arcs, a, u, tol).iter().all(|x| *x)));
    }
    Ok(match find_grid(span, &arcs, n, 2 * m, tol) {
        Some(g) => g.extent(&arcs) <= m,
        None => false,
    })
}

/// Robots off the uniform grid that holds at least `n − f` of them.
pub fn identify_faulty(points: &[Point], f: usize, span: &PatternSpan) -> Result<Vec<usize>> {
    let n = points.len();
    let scale = scale_of(points);
    let tol = GRID_TOL * scale.max(1.0).min(span.length.max(scale));
    let on_tol = 1e-6 * scale.max(1.0);
    let arcs = arcs_on(points, span, on_tol)?;
    let need = n.saturating_sub(f).max(2);
    let grid = find_grid(span, &arcs, need, 2 * n + 4, tol)
        .ok_or_else(|| Error::Unidentifiable("no uniform grid holds n − f robots".into()))?;
    Ok((0..n).filter(|&i| !grid.members[i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Conics of the class for `f` through `f`-subsets of the first `2f` points.
fn candidate_conics(points: &[Point], f: usize) -> Vec<Conic> {
    let pool = (2 * f).min(points.len());
    let mut out: Vec<Conic> = Vec::new();
    for s in subsets(pool, f) {
        let p: Vec<Point> = s.iter().map(|&i| points[i]).collect();
        let fitted: Vec<Conic> = match f {
            2 => fit_line(p[0], p[1]).into_iter().collect(),
            3 => fit_circle(p[0], p[1], p[2]).into_iter().collect(),
            4 => fit_parabolas([p[0], p[1], p[2], p[3]]).unwrap_or_default(),
            5 => fit_conic5([p[0], p[1], p[2], p[3], p[4]]).into_iter().collect(),
            _ => vec![],
        };
        for c in fitted {
            if pattern_classes(f).contains(&c.class()) && !out.iter().any(|o| o.distance(&c) < 1e-9) {
                out.push(c);
            }
        }
    }
    out
}

fn members_of(points: &[Point], conic: &Conic) -> Vec<usize> {
    (0..points.len()).filter(|&i| conic.residual(points[i]) < ON_CONIC_TOL).collect()
}

/// Lower-order completion: the configuration already lies on a line (or,
/// for `f = 4`, a circle) with `n − f` robots on a uniform grid.
fn lower_order_terminal(points: &[Point], f: usize) -> Option<Conic> {
    let n = points.len();
    let conic = if f >= 3 && all_collinear(points) {
        let (i, j) = farthest_pair(points);
        fit_line(points[i], points[j]).ok()?
    } else if f == 4 {
        concyclic(points)?
    } else {
        return None;
    };
    let span = span_for(&conic, points).ok()?;
    let arcs: Vec<f64> = points.iter().map(|p| span.arc_position(*p)).collect();
    find_grid(&span, &arcs, n - f, 2 * n + 4, GRID_TOL).map(|_| conic)
}

fn on_grid(points: &[Point], conic: &Conic, members: &[usize], need: usize) -> bool {
    let on: Vec<Point> = members.iter().map(|&i| points[i]).collect();
    let Ok(span) = span_for(conic, &on) else { return false };
    let arcs: Vec<f64> = on.iter().map(|p| span.arc_position(*p)).collect();
    find_grid(&span, &arcs, need.max(2), 2 * points.len() + 4, GRID_TOL).is_some()
}

fn lower_order_shape(points: &[Point], f: usize) -> bool {
    (f >= 3 && all_collinear(points)) || (f == 4 && concyclic(points).is_some())
}

/// Lowest-ranked robots outside `off` fill the defining set up to `f`.
pub fn pad_faulty_candidates(off_pattern: &[usize], f: usize, ranks: &[usize]) -> Vec<usize> {
    let mut out = off_pattern.to_vec();
    let mut rest: Vec<usize> = (0..ranks.len()).filter(|i| !off_pattern.contains(i)).collect();
    rest.sort_by_key(|&i| ranks[i]);
    for i in rest {
        if out.len() >= f {
            break;
        }
        out.push(i);
    }
    out.sort_unstable();
    out
}

/// Classify a configuration for `f` faults.
///
/// Points are expected in a normalized frame (unit smallest enclosing
/// circle); tolerances are absolute in that frame.
pub fn classify_configuration(points: &[Point], f: usize) -> Result<ConfigClass> {
    let n = points.len();
    if !(1..=5).contains(&f) {
        return Err(Error::InvalidInput(format!("f = {f} is outside 1..=5")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("empty configuration".into()));
    }
    if f >= 2 && n < 2 * f + 1 {
        return Err(Error::TooFewRobots { n, f });
    }
    if f == 1 {
        let first = points[0];
        return Ok(if points.iter().all(|p| p.dist(first) < 1e-12) {
            ConfigClass::Terminal { conic: None }
        } else {
            ConfigClass::TypeO
        });
    }
    if lower_order_shape(points, f) {
        return Ok(match lower_order_terminal(points, f) {
            Some(conic) => ConfigClass::Terminal { conic: Some(conic) },
            None => ConfigClass::TypeO,
        });
    }

    // Any conic holding n − f points holds f of the first 2f points.
    let mut best: Option<(Conic, Vec<usize>)> = None;
    let mut ranks: Option<Vec<usize>> = None;
    for conic in candidate_conics(points, f) {
        let members = members_of(points, &conic);
        if members.len() + f < n {
            continue;
        }
        let replace = match &best {
            None => true,
            Some((_, m)) if members.len() != m.len() => members.len() > m.len(),
            Some((c, m)) if on_grid(points, &conic, &members, n - f) != on_grid(points, c, m, n - f) => {
                // A pattern the live robots have already spread over beats
                // an accidental one.
                on_grid(points, &conic, &members, n - f)
            }
            Some((_, m)) => {
                // Equal containment: the conic holding the lower-ranked set wins.
                let r = ranks.get_or_insert_with(|| signature_ranks(points).unwrap_or_else(|_| vec![1; n]));
                let key = |set: &[usize]| {
                    let mut v: Vec<usize> = set.iter().map(|&i| r[i]).collect();
                    v.sort_unstable();
                    v
                };
                key(&members) < key(m)
            }
        };
        if replace {
            best = Some((conic, members));
        }
    }
    let Some((conic, members)) = best else {
        return Ok(ConfigClass::TypeO);
    };
    if members.len() == n {
        return Ok(ConfigClass::Terminal { conic: Some(conic) });
    }

    let off: Vec<usize> = (0..n).filter(|i| !members.contains(i)).collect();
    let mut defining = off.clone();
    if defining.len() < f {
        // Robots that kept still on the pattern sit off the grid the others
        // moved onto.
        let on: Vec<Point> = members.iter().map(|&i| points[i]).collect();
        if let Ok(span) = span_for(&conic, &on) {
            let arcs: Vec<f64> = on.iter().map(|p| span.arc_position(*p)).collect();
            let need = n - f;
            if let Some(grid) = find_grid(&span, &arcs, need.max(2), 2 * n + 4, GRID_TOL) {
                let strays: Vec<usize> = members.iter().zip(&grid.members).filter(|(_, m)| !**m).map(|(&i, _)| i).collect();
                if defining.len() + strays.len() <= f {
                    defining.extend(strays);
                }
            }
        }
        if defining.len() < f {
            let r = match &ranks {
                Some(r) => r.clone(),
                None => signature_ranks(points)?,
            };
            defining = pad_faulty_candidates(&defining, f, &r);
        }
        defining.sort_unstable();
    }

    let subtype = match detect_symmetry(points) {
        SymmetryClass::Asymmetric => TypeISubtype::Asym,
        SymmetryClass::Reflective { k_on_axis, .. } => TypeISubtype::Reflective { k: k_on_axis },
        SymmetryClass::Rotational { .. } => TypeISubtype::Rotational,
    };
    Ok(ConfigClass::TypeI { subtype, off_pattern: off, defining, on_pattern_conic: conic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pattern_span, uniform_points, Walk};

    fn normalized(points: &[Point]) -> Vec<Point> {
        let c = smallest_enclosing_circle(points).unwrap();
        points.iter().map(|p| (*p - c.center) * (1.0 / c.radius)).collect()
    }

    #[test]
    fn seven_on_a_circle_is_terminal() {
        let pts: Vec<Point> = [0.1, 0.9, 1.7, 2.2, 3.5, 4.4, 5.9].iter().map(|&a| Point::from_polar(1.0, a)).collect();
        assert!(matches!(classify_configuration(&pts, 3).unwrap(), ConfigClass::Terminal { conic: Some(_) }));
    }

    #[test]
    fn seven_on_a_line_two_off_is_type_i() {
        let mut pts: Vec<Point> = [0.0, 1.0, 2.5, 3.0, 4.2, 6.0, 7.7].iter().map(|&x| Point::new(x, 0.3 * x)).collect();
        pts.push(Point::new(1.0, 3.0));
        pts.push(Point::new(5.0, -2.0));
        let pts = normalized(&pts);
        match classify_configuration(&pts, 2).unwrap() {
            ConfigClass::TypeI { off_pattern, defining, on_pattern_conic, .. } => {
                assert_eq!(off_pattern, vec![7, 8]);
                assert_eq!(defining, vec![7, 8]);
                assert_eq!(on_pattern_conic.class(), ConicClass::Line);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn generic_points_are_type_o() {
        let pts = normalized(&[
            Point::new(0.0, 0.0),
            Point::new(3.1, 0.4),
            Point::new(1.2, 2.9),
            Point::new(-2.3, 1.7),
            Point::new(-1.1, -2.6),
            Point::new(2.2, -1.9),
            Point::new(0.4, 1.1),
        ]);
        assert_eq!(classify_configuration(&pts, 3).unwrap(), ConfigClass::TypeO);
        // Exhaustive check: no circle through any three holds a fourth.
        for s in subsets(7, 3) {
            let c = fit_circle(pts[s[0]], pts[s[1]], pts[s[2]]).unwrap();
            assert_eq!(members_of(&pts, &c).len(), 3);
        }
    }

    #[test]
    fn too_few_robots() {
        let pts: Vec<Point> = (0..6).map(|i| Point::new(i as f64, (i * i) as f64)).collect();
        assert_eq!(classify_configuration(&pts, 3), Err(Error::TooFewRobots { n: 6, f: 3 }));
    }

    #[test]
    fn uniformity_examples() {
        let span = pattern_span(&Conic::circle(Point::ORIGIN, 1.0)).unwrap();
        let quarters = uniform_points(&span, &Walk::FromFirst, 4, 0.3).unwrap();
        assert!(is_uniform(&quarters, &span).unwrap());
        let line = make_line_span(Point::ORIGIN, Point::new(10.0, 0.0)).unwrap();
        let uneven: Vec<Point> = [0.0, 1.0, 2.0, 3.5].iter().map(|&x| Point::new(x, 0.0)).collect();
        assert!(!is_uniform(&uneven, &line).unwrap());
        assert!(is_uniform(&[Point::new(1.0, 0.0)], &span).unwrap());
        assert!(matches!(is_uniform(&[Point::new(0.0, 1.5)], &span), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn quasi_uniform_examples() {
        let line = make_line_span(Point::ORIGIN, Point::new(10.0, 0.0)).unwrap();
        let gapped: Vec<Point> = [0.0, 1.0, 3.0].iter().map(|&x| Point::new(x, 0.0)).collect();
        assert!(is_quasi_uniform(&gapped, &line, 4).unwrap());
        let irrational: Vec<Point> = [0.0, 1.0, 2f64.sqrt()].iter().map(|&x| Point::new(2.0 * x, 0.0)).collect();
        assert!((3..=6).all(|m| !is_quasi_uniform(&irrational, &line, m).unwrap()));
        let span = pattern_span(&Conic::circle(Point::ORIGIN, 1.0)).unwrap();
        let even = uniform_points(&span, &Walk::FromFirst, 5, 0.1).unwrap();
        assert!(is_quasi_uniform(&even, &span, 5).unwrap());
    }

    #[test]
    fn identify_faulty_examples() {
        let span = pattern_span(&Conic::circle(Point::ORIGIN, 1.0)).unwrap();
        let mut pts = uniform_points(&span, &Walk::FromFirst, 7, 0.0).unwrap();
        pts.truncate(5);
        pts.push(span.point_at(0.37));
        pts.push(span.point_at(4.01));
        assert_eq!(identify_faulty(&pts, 2, &span).unwrap(), vec![5, 6]);
        let uniform = uniform_points(&span, &Walk::FromFirst, 7, 0.0).unwrap();
        assert!(identify_faulty(&uniform, 2, &span).unwrap().is_empty());
        let arbitrary: Vec<Point> = [0.0, 0.5, 2f64.sqrt(), 3f64.sqrt(), 2.9, 3.3, 5.0].iter().map(|&s| span.point_at(s)).collect();
        assert!(matches!(identify_faulty(&arbitrary, 2, &span), Err(Error::Unidentifiable(_))));
    }

    #[test]
    fn padding() {
        let ranks = vec![3, 1, 4, 2, 5];
        assert_eq!(pad_faulty_candidates(&[2, 4], 3, &ranks), vec![1, 2, 4]);
        assert_eq!(pad_faulty_candidates(&[0, 2, 4], 3, &ranks), vec![0, 2, 4]);
        assert_eq!(pad_faulty_candidates(&[], 3, &ranks), vec![0, 1, 3]);
    }
}
