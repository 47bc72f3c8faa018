//! The compute step: destinations for every robot from one snapshot.
//!
//! Planning happens in a normalized frame (smallest enclosing circle
//! centered at the origin with unit radius) and the plan is mapped back to
//! the caller's coordinates. The normalization uses translation and scale
//! only, so the caller's orientation and handedness survive; that is what
//! resolves the two-candidate cases.

use std::cmp::Ordering as CmpOrdering;

use serde::{Deserialize, Serialize};

use crate::classifier::{
    classify_configuration, farthest_pair, find_grid, fit_target, span_for, ConfigClass, TypeISubtype, GRID_TOL,
};
use crate::error::{Error, Result};
use crate::geometry::{
    intersect_conics, make_line_span, pattern_span, pattern_span_near, smallest_enclosing_circle, Conic, ConicClass,
    ConicShape, PatternSpan, Point, Similarity, Walk, ON_CONIC_TOL,
};
use crate::symmetry::{detect_symmetry, order_robots, rank_by_signature, Axis, Ordering, SymmetryClass};

/// A grid slot closer than this fraction of the span length to an obstacle
/// counts as overlapping it.
pub const OVERLAP_TOL: f64 = 1e-7;

const SIDE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Target {
    /// Point formation (`f = 1`).
    Gather(Point),
    Pattern { conic: Conic, endpoints: Vec<Point>, length: f64 },
}

impl Target {
    fn from_span(span: &PatternSpan) -> Target {
        Target::Pattern { conic: span.conic, endpoints: span.endpoints.clone(), length: span.length }
    }

    pub fn conic(&self) -> Option<&Conic> {
        match self {
            Target::Pattern { conic, .. } => Some(conic),
            Target::Gather(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DestinationPlan {
    pub class: ConfigClass,
    pub target: Option<Target>,
    /// Pattern the robots currently share, if any.
    pub current: Option<Conic>,
    /// One or two candidates per robot, indexed like the snapshot. Empty
    /// when nobody has to move.
    pub assignments: Vec<Vec<Point>>,
    pub u_used: f64,
    pub intersections: Vec<Point>,
}

impl DestinationPlan {
    fn idle(class: ConfigClass) -> DestinationPlan {
        let current = match &class {
            ConfigClass::Terminal { conic } => *conic,
            _ => None,
        };
        DestinationPlan { class, target: None, current, assignments: Vec::new(), u_used: 0.0, intersections: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// Every candidate in the plan.
    pub fn candidates(&self) -> impl Iterator<Item = Point> + '_ {
        self.assignments.iter().flatten().copied()
    }

    /// Image of the plan under `t`.
    pub fn transformed(&self, t: &Similarity) -> DestinationPlan {
        let class = match &self.class {
            ConfigClass::Terminal { conic } => ConfigClass::Terminal { conic: conic.map(|c| c.transformed(t)) },
            ConfigClass::TypeI { subtype, off_pattern, defining, on_pattern_conic } => ConfigClass::TypeI {
                subtype: *subtype,
                off_pattern: off_pattern.clone(),
                defining: defining.clone(),
                on_pattern_conic: on_pattern_conic.transformed(t),
            },
            ConfigClass::TypeO => ConfigClass::TypeO,
        };
        let target = self.target.as_ref().map(|target| match target {
            Target::Gather(p) => Target::Gather(t.apply(*p)),
            Target::Pattern { conic, endpoints, length } => Target::Pattern {
                conic: conic.transformed(t),
                endpoints: endpoints.iter().map(|p| t.apply(*p)).collect(),
                length: length * t.length_scale(),
            },
        });
        DestinationPlan {
            class,
            target,
            current: self.current.map(|c| c.transformed(t)),
            assignments: self.assignments.iter().map(|c| c.iter().map(|p| t.apply(*p)).collect()).collect(),
            u_used: self.u_used * t.length_scale(),
            intersections: self.intersections.iter().map(|p| t.apply(*p)).collect(),
        }
    }
}

fn validate(snapshot: &[Point], f: usize) -> Result<()> {
    if !(1..=5).contains(&f) {
        return Err(Error::InvalidInput(format!("f = {f} is outside 1..=5")));
    }
    if snapshot.is_empty() {
        return Err(Error::InvalidInput("empty snapshot".into()));
    }
    if snapshot.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("non-finite position".into()));
    }
    let n = snapshot.len();
    if f >= 2 && n < 2 * f + 1 {
        return Err(Error::TooFewRobots { n, f });
    }
    Ok(())
}

/// Destinations for every robot in `snapshot` when `f` robots may have crashed.
pub fn compute_destinations(snapshot: &[Point], f: usize) -> Result<DestinationPlan> {
    validate(snapshot, f)?;
    if f == 1 {
        return point_formation_step(snapshot);
    }
    let sec = smallest_enclosing_circle(snapshot)?;
    let scale = sec.radius;
    for i in 0..snapshot.len() {
        for j in i + 1..snapshot.len() {
            if snapshot[i].dist(snapshot[j]) <= 1e-12 * scale {
                return Err(Error::InvalidInput("positions must be distinct".into()));
            }
        }
    }
    let to_unit = Similarity::normalizing(sec.center, sec.radius);
    let q: Vec<Point> = snapshot.iter().map(|p| to_unit.apply(*p)).collect();
    let plan = match classify_configuration(&q, f)? {
        class @ ConfigClass::Terminal { .. } => DestinationPlan::idle(class),
        ConfigClass::TypeO => type_o_plan(&q, f, &rank_by_signature(&q)?)?,
        class @ ConfigClass::TypeI { .. } => type_i_plan(&q, f, &class)?,
    };
    Ok(plan.transformed(&to_unit.inverse()))
}

/// Gathering for a single fault: two occupied positions swap, anything else
/// heads for the center of the smallest enclosing circle.
pub fn point_formation_step(snapshot: &[Point]) -> Result<DestinationPlan> {
    validate(snapshot, 1)?;
    let sec = smallest_enclosing_circle(snapshot)?;
    let same = |a: Point, b: Point| a.dist(b) <= 1e-12 * (1.0 + sec.radius);
    let mut sites: Vec<Point> = Vec::new();
    for &p in snapshot {
        if !sites.iter().any(|s| same(*s, p)) {
            sites.push(p);
        }
    }
    match sites.len() {
        1 => Ok(DestinationPlan::idle(ConfigClass::Terminal { conic: None })),
        2 => Ok(DestinationPlan {
            class: ConfigClass::TypeO,
            target: None,
            current: None,
            assignments: snapshot.iter().map(|p| vec![if same(*p, sites[0]) { sites[1] } else { sites[0] }]).collect(),
            u_used: 0.0,
            intersections: Vec::new(),
        }),
        _ => Ok(DestinationPlan {
            class: ConfigClass::TypeO,
            target: Some(Target::Gather(sec.center)),
            current: None,
            assignments: vec![vec![sec.center]; snapshot.len()],
            u_used: 0.0,
            intersections: Vec::new(),
        }),
    }
}

fn assign_by_rank(n: usize, by_rank: &[usize], slots: &[Point]) -> Vec<Vec<Point>> {
    let mut assignments = vec![Vec::new(); n];
    for (k, &robot) in by_rank.iter().enumerate() {
        assignments[robot].push(slots[k]);
    }
    if slots.len() > n {
        // The spare slot goes to the highest-ranked robot as a second choice.
        assignments[by_rank[n - 1]].push(slots[n]);
    }
    assignments
}

/// Pattern outside the smallest enclosing circle, placed relative to the
/// lowest-ranked robot.
pub fn type_o_plan(snapshot: &[Point], f: usize, ordering: &Ordering) -> Result<DestinationPlan> {
    let n = snapshot.len();
    let sec = smallest_enclosing_circle(snapshot)?;
    let (o, d) = (sec.center, 2.0 * sec.radius);
    let by_rank = ordering.by_rank();
    let a = by_rank
        .iter()
        .map(|&i| snapshot[i])
        .find(|p| p.dist(o) > 1e-9 * d)
        .ok_or_else(|| Error::DegenerateInput("every robot sits at the enclosing-circle center".into()))?;
    let dir = (a - o).normalized();
    let b = o + dir * d;
    let (span, walk, half_phase) = match f {
        2 => (make_line_span(b + dir.perp() * (0.5 * d), b - dir.perp() * (0.5 * d))?, Walk::FromFirst, true),
        3 => (pattern_span(&Conic::circle(o, d))?, Walk::Around { from: b, ccw: true }, false),
        4 | 5 => (pattern_span(&Conic::parabola(b, -dir, d))?, Walk::FromFirst, true),
        _ => return Err(Error::InvalidInput(format!("no pattern for f = {f}"))),
    };
    let u = span.length / n as f64;
    let slots = span.grid(&walk, n, u, if half_phase { 0.5 * u } else { 0.0 })?;
    if slots.iter().any(|s| s.dist(o) <= sec.radius * (1.0 + 1e-9)) {
        return Err(Error::DegenerateInput("target pattern meets the enclosing circle".into()));
    }
    Ok(DestinationPlan {
        class: ConfigClass::TypeO,
        target: Some(Target::from_span(&span)),
        current: None,
        assignments: assign_by_rank(n, &by_rank, &slots),
        u_used: u,
        intersections: Vec::new(),
    })
}

fn collides(slots: &[Point], obstacles: &[Point], tol: f64) -> bool {
    slots.iter().any(|s| obstacles.iter().any(|o| s.dist(*o) < tol))
}

fn intersections_of(current: &Conic, target: &Conic) -> Result<Vec<Point>> {
    match intersect_conics(current, target) {
        Ok(points) => Ok(points),
        Err(Error::IdenticalConics) => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}

/// Pattern through the defining robots, every robot moving onto it.
pub fn type_i_plan(snapshot: &[Point], f: usize, class: &ConfigClass) -> Result<DestinationPlan> {
    let ConfigClass::TypeI { subtype, defining, on_pattern_conic, .. } = class else {
        return Err(Error::InvalidInput("type_i_plan needs a Type I configuration".into()));
    };
    if defining.len() != f {
        return Err(Error::InvalidInput(format!("{} defining robots for f = {f}", defining.len())));
    }
    let dp: Vec<Point> = defining.iter().map(|&i| snapshot[i]).collect();
    let target = fit_target(&dp)?;
    let intersections = intersections_of(on_pattern_conic, &target)?;
    let mut obstacles: Vec<Point> = snapshot.iter().copied().filter(|p| target.residual(*p) < ON_CONIC_TOL).collect();
    obstacles.extend(intersections.iter().copied());

    let ctx = TypeIContext { snapshot, defining, dp: &dp, target: &target, current: on_pattern_conic, obstacles: &obstacles };
    let (span, u, assignments) = match subtype {
        TypeISubtype::Asym => ctx.asymmetric()?,
        TypeISubtype::Reflective { .. } => ctx.reflective()?,
        TypeISubtype::Rotational => ctx.rotational()?,
    };
    Ok(DestinationPlan {
        class: class.clone(),
        target: Some(Target::from_span(&span)),
        current: Some(*on_pattern_conic),
        assignments,
        u_used: u,
        intersections,
    })
}

struct TypeIContext<'a> {
    snapshot: &'a [Point],
    defining: &'a [usize],
    dp: &'a [Point],
    target: &'a Conic,
    current: &'a Conic,
    obstacles: &'a [Point],
}

type Layout = (PatternSpan, f64, Vec<Vec<Point>>);

impl TypeIContext<'_> {
    fn n(&self) -> usize {
        self.snapshot.len()
    }

    /// Whether every configuration the plan can lead to, with the defining
    /// robots left where they are, tells them apart from the grid of the
    /// others. Robots holding two candidates may take either, so each
    /// combination is tried (up to a cap). Some grid sizes line the stayers
    /// up with a second, equally good grid.
    fn separates(&self, assignments: &[Vec<Point>]) -> bool {
        let n = self.n();
        let stays = |i: usize| self.defining.contains(&i);
        let forks: Vec<usize> = (0..n).filter(|&i| !stays(i) && assignments[i].len() > 1).collect();
        let combos: Vec<u64> = if forks.len() <= 8 { (0..1u64 << forks.len()).collect() } else { vec![0, u64::MAX] };
        combos.into_iter().all(|bits| {
            let after: Vec<Point> = (0..n)
                .map(|i| {
                    if stays(i) {
                        return self.snapshot[i];
                    }
                    let pick = forks.iter().position(|&j| j == i).map_or(0, |b| (bits >> b.min(63) & 1) as usize);
                    assignments[i].get(pick).or(assignments[i].first()).copied().unwrap_or(self.snapshot[i])
                })
                .collect();
            let Ok(span) = span_for(self.target, &after) else { return false };
            let arcs: Vec<f64> = after.iter().map(|p| span.arc_position(*p)).collect();
            match find_grid(&span, &arcs, n - self.defining.len(), 2 * n + 4, GRID_TOL) {
                Some(grid) => (0..n).all(|i| grid.members[i] != stays(i)),
                None => false,
            }
        })
    }

    /// Segment between the outermost defining robots, starting at the end
    /// nearer `near`.
    fn line_span(&self, near: Point) -> Result<PatternSpan> {
        let (i, j) = farthest_pair(self.dp);
        let (a, b) = (self.dp[i], self.dp[j]);
        if a.dist(near) <= b.dist(near) {
            make_line_span(a, b)
        } else {
            make_line_span(b, a)
        }
    }

    fn asymmetric(&self) -> Result<Layout> {
        let n = self.n();
        let ordering = order_robots(self.snapshot)?;
        let by_rank = ordering.by_rank();
        let mut anchors: Vec<usize> = self.defining.to_vec();
        anchors.sort_by_key(|&i| ordering.ranks[i]);
        let anchor_points: Vec<Point> = anchors.iter().map(|&i| self.snapshot[i]).collect();
        let a = anchor_points[0];
        let (span, u, slots) = match self.target.class() {
            ConicClass::Line => {
                let span = self.line_span(a)?;
                // Past n + 1 slots only to keep the stayers apart, never to
                // escape a collision.
                let mut first = None;
                for m in n..=2 * n {
                    if m > n + 1 && first.is_none() {
                        break;
                    }
                    let u = span.length / m as f64;
                    let slots = span.grid(&Walk::FromFirst, m, u, 0.5 * u)?;
                    if collides(&slots, self.obstacles, OVERLAP_TOL * span.length) {
                        continue;
                    }
                    let assignments = assign_by_rank(n, &by_rank, &slots);
                    if self.separates(&assignments) {
                        return Ok((span, u, assignments));
                    }
                    first.get_or_insert((u, assignments));
                }
                let (u, assignments) = first.ok_or(Error::NoValidGrid)?;
                return Ok((span, u, assignments));
            }
            ConicClass::Circle | ConicClass::Ellipse => {
                let span = pattern_span(self.target)?;
                let (u, slots) = nonoverlap_circle(&span, n, &anchor_points, self.obstacles)?;
                (span, u, slots)
            }
            ConicClass::Parabola | ConicClass::Hyperbola => {
                let span = pattern_span_near(self.target, self.dp)?;
                let s = span.arc_position(a);
                // An anchor at the vertex is a tie; the first endpoint wins it.
                let near_first = s.abs() <= (span.length - s).abs() + OVERLAP_TOL * span.length;
                let walk = if near_first { Walk::FromFirst } else { Walk::FromSecond };
                let (u, slots) = nonoverlap_shift(&span, &walk, n, self.obstacles)?;
                (span, u, slots)
            }
            ConicClass::Degenerate => return Err(Error::DegenerateInput("degenerate target".into())),
        };
        Ok((span, u, assign_by_rank(n, &by_rank, &slots)))
    }

    fn reflective(&self) -> Result<Layout> {
        let n = self.n();
        let SymmetryClass::Reflective { axis, .. } = detect_symmetry(self.snapshot) else {
            return Err(Error::UnsupportedSymmetry("reflective plan without a reflection axis".into()));
        };
        let axis = orient_axis(self.snapshot, axis)?;
        let e = axis.dir();
        let mirror = |p: Point| axis.reflect(p);

        if self.target.class() == ConicClass::Line && self.dp.iter().all(|p| axis.side(*p).abs() < SIDE_TOL) {
            return Err(Error::UnsupportedSymmetry("target line is the symmetry axis".into()));
        }
        let (span, walk) = if self.target.class().is_closed() {
            let span = pattern_span(self.target)?;
            let axis_line = Conic::line_through(axis.point, axis.point + e)?;
            let mut on_axis = intersections_of(&axis_line, self.target)?;
            on_axis.sort_by(|p, q| e.dot(*p).total_cmp(&e.dot(*q)));
            let back = *on_axis
                .first()
                .ok_or_else(|| Error::UnsupportedSymmetry("symmetry axis misses the target".into()))?;
            let probe = span.point_at(span.arc_position(back) + 1e-3 * span.length);
            (span, Walk::Around { from: back, ccw: axis.side(probe) > 0.0 })
        } else {
            let span = if self.target.class() == ConicClass::Line {
                self.line_span(self.dp[0])?
            } else {
                pattern_span_near(self.target, self.dp)?
            };
            let tol = 1e-7 * span.length.max(1.0);
            if mirror(span.endpoints[0]).dist(span.endpoints[1]) > tol {
                return Err(Error::UnsupportedSymmetry("target span is not mirror-symmetric".into()));
            }
            let walk = if axis.side(span.endpoints[0]) > 0.0 { Walk::FromFirst } else { Walk::FromSecond };
            (span, walk)
        };
        if span.polyline(16).iter().any(|p| self.target.residual(mirror(*p)) > 1e-7) {
            return Err(Error::UnsupportedSymmetry("target is not symmetric about the axis".into()));
        }

        let side = |p: Point| axis.side(p);
        let along = |p: Point| e.dot(p - axis.point);
        let mut movers: Vec<usize> = (0..n).filter(|&i| side(self.snapshot[i]) > -SIDE_TOL).collect();
        let k = movers.iter().filter(|&&i| side(self.snapshot[i]).abs() <= SIDE_TOL).count();
        let right: Vec<usize> = (0..n).filter(|&i| side(self.snapshot[i]) < -SIDE_TOL).collect();
        if right.len() + k != movers.len() {
            return Err(Error::UnsupportedSymmetry("sides of the axis hold different counts".into()));
        }
        movers.sort_by(|&i, &j| {
            let (p, q) = (self.snapshot[i], self.snapshot[j]);
            cmp_tol(along(p), along(q)).then_with(|| cmp_tol(side(p).abs(), side(q).abs()))
        });

        let mut first = None;
        let mut m = n + k;
        while m <= 3 * n + k {
            let u = span.length / m as f64;
            let slots = span.grid(&walk, m, u, 0.5 * u)?;
            m += 2;
            if collides(&slots, self.obstacles, OVERLAP_TOL * span.length) {
                continue;
            }
            let m = m - 2;
            let mut assignments = vec![Vec::new(); n];
            for (j, &i) in movers.iter().enumerate() {
                let (left_slot, right_slot) = (slots[j], slots[m - 1 - j]);
                let p = self.snapshot[i];
                if side(p).abs() <= SIDE_TOL {
                    assignments[i] = vec![left_slot, right_slot];
                } else {
                    assignments[i] = vec![left_slot];
                    let image = mirror(p);
                    let partner = *right
                        .iter()
                        .min_by(|&&x, &&y| self.snapshot[x].dist(image).total_cmp(&self.snapshot[y].dist(image)))
                        .expect("right side is non-empty when a left robot exists");
                    assignments[partner] = vec![right_slot];
                }
            }
            if self.separates(&assignments) {
                return Ok((span, u, assignments));
            }
            first.get_or_insert((u, assignments));
        }
        let (u, assignments) = first.ok_or(Error::NoValidGrid)?;
        Ok((span, u, assignments))
    }

    fn rotational(&self) -> Result<Layout> {
        let SymmetryClass::Rotational { center, .. } = detect_symmetry(self.snapshot) else {
            return Err(Error::UnsupportedSymmetry("rotational plan without rotational symmetry".into()));
        };
        match (self.target.class(), self.current.class()) {
            (ConicClass::Line, ConicClass::Line) => self.rotational_lines(center),
            (ConicClass::Circle, ConicClass::Circle) => self.rotational_circles(center),
            _ => Err(Error::UnsupportedSymmetry(format!(
                "rotational {} configuration with a {} target",
                self.current.class().name(),
                self.target.class().name()
            ))),
        }
    }

    /// Two lines crossing at the center: each robot moves to the half of the
    /// target line that makes the acute angle with its own half-line.
    fn rotational_lines(&self, x: Point) -> Result<Layout> {
        let n = self.n();
        let (ConicShape::Line { dir: el, .. }, ConicShape::Line { dir: mut em, .. }) =
            (self.current.shape()?, self.target.shape()?)
        else {
            unreachable!("both conics are lines");
        };
        let dot = em.dot(el);
        if dot.abs() < 1e-9 {
            // Perpendicular lines: turn counterclockwise.
            em = el.perp();
        } else if dot < 0.0 {
            em = -em;
        }
        let (i, j) = farthest_pair(self.dp);
        let (a, b) = if em.dot(self.dp[i] - x) < em.dot(self.dp[j] - x) {
            (self.dp[i], self.dp[j])
        } else {
            (self.dp[j], self.dp[i])
        };
        let span = make_line_span(a, b)?;

        let mut plus: Vec<(f64, usize)> = Vec::new();
        let mut minus: Vec<(f64, usize)> = Vec::new();
        let mut hub = None;
        for (i, p) in self.snapshot.iter().enumerate() {
            let v = *p - x;
            if v.norm() < SIDE_TOL {
                hub = Some(i);
                continue;
            }
            let s = if self.target.residual(*p) < ON_CONIC_TOL { em.dot(v) } else { el.dot(v) };
            if s > 0.0 { &mut plus } else { &mut minus }.push((v.norm(), i));
        }
        if plus.len() != minus.len() {
            return Err(Error::UnsupportedSymmetry("halves of the crossing hold different counts".into()));
        }
        for half in [&mut plus, &mut minus] {
            half.sort_by(|p, q| cmp_tol(p.0, q.0).then(p.1.cmp(&q.1)));
        }
        let skip = usize::from(hub.is_some());
        let mut first = None;
        let mut m = n + n % 2;
        while m <= 3 * n {
            let u = span.length / m as f64;
            let slots = span.grid(&Walk::FromFirst, m, u, 0.5 * u)?;
            m += 2;
            if collides(&slots, self.obstacles, OVERLAP_TOL * span.length) {
                continue;
            }
            let m = m - 2;
            let half = m / 2;
            let mut assignments = vec![Vec::new(); n];
            for (k, &(_, i)) in plus.iter().enumerate() {
                assignments[i] = vec![slots[half + skip + k]];
            }
            for (k, &(_, i)) in minus.iter().enumerate() {
                assignments[i] = vec![slots[half - 1 - skip - k]];
            }
            if let Some(i) = hub {
                // Symmetric choices: the robot's own orientation decides.
                let mut pair = vec![slots[half], slots[half - 1]];
                pair.sort_by(|p, q| q.x.total_cmp(&p.x).then(q.y.total_cmp(&p.y)));
                assignments[i] = pair;
            }
            if self.separates(&assignments) {
                return Ok((span, u, assignments));
            }
            first.get_or_insert((u, assignments));
        }
        let (u, assignments) = first.ok_or(Error::NoValidGrid)?;
        Ok((span, u, assignments))
    }

    /// Concentric circles with three robots on the target: `n + 3` slots,
    /// the target robots getting the slots on either side of them.
    fn rotational_circles(&self, x: Point) -> Result<Layout> {
        let n = self.n();
        let (ConicShape::Circle { center: ck, .. }, ConicShape::Circle { center: ct, radius: rt }) =
            (self.current.shape()?, self.target.shape()?)
        else {
            unreachable!("both conics are circles");
        };
        if ck.dist(x) > 1e-7 || ct.dist(x) > 1e-7 {
            return Err(Error::UnsupportedSymmetry("circles are not concentric".into()));
        }
        if self.defining.len() != 3 || !n.is_multiple_of(3) {
            return Err(Error::UnsupportedSymmetry("rotational circles need three target robots and n divisible by 3".into()));
        }
        let span = pattern_span(self.target)?;
        let p = span.length;
        let m = n + 3;
        let u = p / m as f64;
        let per = m / 3;
        let angle_of = |q: Point| span.arc_position(ct + (q - ct).normalized() * rt);
        let mut marks: Vec<(f64, usize)> = self.defining.iter().map(|&i| (angle_of(self.snapshot[i]), i)).collect();
        marks.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut assignments = vec![Vec::new(); n];
        let mut slots_all = Vec::with_capacity(m);
        for s in 0..3 {
            let (start, robot) = marks[s];
            let width = (marks[(s + 1) % 3].0 - start).rem_euclid(p);
            assignments[robot] = vec![span.point_at(start + 0.5 * u), span.point_at(start - 0.5 * u)];
            let mut inside: Vec<(f64, f64, usize)> = (0..n)
                .filter(|i| !self.defining.contains(i))
                .filter_map(|i| {
                    let q = self.snapshot[i];
                    let mut rel = (angle_of(q) - start).rem_euclid(p);
                    if rel > p - 1e-9 {
                        rel = 0.0;
                    }
                    (rel < width - 1e-9).then_some((rel, q.dist(x), i))
                })
                .collect();
            if inside.len() + 2 != per {
                return Err(Error::UnsupportedSymmetry("sectors hold unequal robot counts".into()));
            }
            inside.sort_by(|a, b| cmp_tol(a.0, b.0).then_with(|| cmp_tol(a.1, b.1)));
            for (j, &(_, _, i)) in inside.iter().enumerate() {
                assignments[i] = vec![span.point_at(start + (j as f64 + 1.5) * u)];
            }
            slots_all.extend((0..per).map(|j| span.point_at(start + (j as f64 + 0.5) * u)));
        }
        if collides(&slots_all, self.obstacles, OVERLAP_TOL * p) {
            return Err(Error::NoValidGrid);
        }
        Ok((span, u, assignments))
    }
}

fn cmp_tol(a: f64, b: f64) -> CmpOrdering {
    if (a - b).abs() < SIDE_TOL {
        CmpOrdering::Equal
    } else {
        a.total_cmp(&b)
    }
}

/// Direction of the axis every robot agrees on: the one under which the
/// sorted `(along, |across|)` coordinates come first lexicographically.
fn orient_axis(points: &[Point], axis: Axis) -> Result<Axis> {
    let key = |e: Point| {
        let mut v: Vec<(f64, f64)> =
            points.iter().map(|p| (e.dot(*p - axis.point), e.cross(*p - axis.point).abs())).collect();
        v.sort_by(|a, b| cmp_tol(a.0, b.0).then_with(|| cmp_tol(a.1, b.1)));
        v
    };
    let e = axis.dir();
    let (fwd, back) = (key(e), key(-e));
    for (a, b) in fwd.iter().zip(&back) {
        match cmp_tol(a.0, b.0).then_with(|| cmp_tol(a.1, b.1)) {
            CmpOrdering::Less => return Ok(axis),
            CmpOrdering::Greater => return Ok(Axis { point: axis.point, angle: (-e).angle() }),
            CmpOrdering::Equal => {}
        }
    }
    Err(Error::UnsupportedSymmetry("axis direction cannot be told apart".into()))
}

/// `n` slots at `u = P/n` from the first endpoint (phase `u/2`), or `n + 1`
/// slots at `P/(n+1)` when the first grid hits a forbidden point.
pub fn nonoverlap_line(span: &PatternSpan, n: usize, forbidden: &[Point]) -> Result<(f64, Vec<Point>)> {
    if n == 0 {
        return Err(Error::InvalidInput("no robots to place".into()));
    }
    for m in [n, n + 1] {
        let u = span.length / m as f64;
        let slots = span.grid(&Walk::FromFirst, m, u, 0.5 * u)?;
        if !collides(&slots, forbidden, OVERLAP_TOL * span.length) {
            return Ok((u, slots));
        }
    }
    Err(Error::NoValidGrid)
}

/// Closed-curve grid anchored halfway between `anchors[0]` and the nearest
/// point of the grids through the anchors, ordered from there in the
/// direction that meets `anchors[1]` before `anchors[2]`.
pub fn nonoverlap_circle(
    span: &PatternSpan,
    n: usize,
    anchors: &[Point],
    forbidden: &[Point],
) -> Result<(f64, Vec<Point>)> {
    if n == 0 || anchors.is_empty() {
        return Err(Error::InvalidInput("nonoverlap_circle needs robots and an anchor".into()));
    }
    let p = span.length;
    let tol = OVERLAP_TOL * p;
    let sa = span.arc_position(anchors[0]);
    let ahead = |q: &Point| (span.arc_position(*q) - sa).rem_euclid(p);
    let forward = match anchors {
        [_, b, c, ..] => ahead(b) < ahead(c),
        [_, b] => ahead(b) <= 0.5 * p,
        _ => true,
    };
    let step = if forward { 1.0 } else { -1.0 };
    for m in [n, n + 1] {
        let u = p / m as f64;
        let mut offsets = vec![u, -u];
        for q in &anchors[1..] {
            let r = ahead(q).rem_euclid(u);
            offsets.push(r);
            offsets.push(r - u);
        }
        offsets.retain(|d| d.abs() > tol);
        for delta in nearest_first(offsets, tol) {
            let start = sa + 0.5 * delta;
            let slots: Vec<Point> = (0..m).map(|j| span.point_at(start + step * j as f64 * u)).collect();
            if !collides(&slots, forbidden, tol) {
                return Ok((u, slots));
            }
        }
    }
    Err(Error::NoValidGrid)
}

/// Offsets by increasing size. Offsets of equal size up to `tol` form one
/// group, positive first, so that rounding never decides between the two
/// directions.
fn nearest_first(mut offsets: Vec<f64>, tol: f64) -> Vec<f64> {
    offsets.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let mut out: Vec<f64> = Vec::with_capacity(offsets.len());
    let mut start = 0;
    while start < offsets.len() {
        let base = offsets[start].abs();
        let end = offsets[start..].iter().position(|d| d.abs() - base > tol).map_or(offsets.len(), |k| start + k);
        let mut group = offsets[start..end].to_vec();
        group.sort_by(|x, y| y.total_cmp(x));
        for d in group {
            if out.last().is_none_or(|last| (d - last).abs() > tol) {
                out.push(d);
            }
        }
        start = end;
    }
    out
}

/// Open-curve grid from the walk start, shifted by half the gap to the
/// nearest obstacle until no slot overlaps one; `n + 1` slots as a fallback.
pub fn nonoverlap_shift(span: &PatternSpan, walk: &Walk, n: usize, obstacles: &[Point]) -> Result<(f64, Vec<Point>)> {
    if n == 0 {
        return Err(Error::InvalidInput("no robots to place".into()));
    }
    let p = span.length;
    let tol = OVERLAP_TOL * p;
    // Walk distances of obstacles lying on the spanned piece of the curve.
    let marks: Vec<f64> = obstacles
        .iter()
        .filter(|o| span.point_at(span.arc_position(**o)).dist(**o) < 1e-7 * p.max(1.0))
        .map(|o| span.walk_distance(walk, *o))
        .filter(|w| *w > -tol && *w < p + tol)
        .collect();
    for m in [n, n + 1] {
        let u = p / m as f64;
        let mut phase = 0.5 * u;
        for _ in 0..64 {
            let gaps: Vec<f64> = marks
                .iter()
                .map(|w| {
                    let k = ((w - phase) / u).round().clamp(0.0, (m - 1) as f64);
                    w - (phase + k * u)
                })
                .collect();
            if gaps.iter().all(|g| g.abs() >= tol) {
                return Ok((u, span.grid(walk, m, u, phase)?));
            }
            let open: Vec<f64> = gaps.iter().copied().filter(|g| g.abs() >= tol).collect();
            let shift = nearest_first(open, tol).first().map_or(0.25 * u, |g| 0.5 * g);
            let next = phase + shift;
            if next <= tol || next >= u - tol {
                break;
            }
            phase = next;
        }
    }
    Err(Error::NoValidGrid)
}
