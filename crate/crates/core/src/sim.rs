//! Fully synchronous look-compute-move rounds with crashed robots, plus the
//! checker that replays a finished run against the algorithm's guarantees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{all_collinear, concyclic, find_grid, fit_target, pattern_classes, span_for, GRID_TOL};
use crate::error::{Error, Result};
use crate::formation::{compute_destinations, DestinationPlan, Target};
use crate::geometry::{in_convex_position, smallest_enclosing_circle, Conic, ConicClass, Point, Similarity};
use crate::symmetry::detect_symmetry;

/// Geometric tolerance of the checker.
pub const VERIFY_TOL: f64 = 1e-6;

/// Destinations closer than this count as equal in the distinctness checks.
pub const DISTINCT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Robot {
    /// Known to the simulator only.
    pub sim_id: usize,
    pub position: Point,
    pub crashed: bool,
    /// World-to-local transform.
    pub frame: Similarity,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioOptions {
    #[serde(default)]
    pub at_most_f: bool,
    #[serde(default)]
    pub allow_reflective_initial: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n: usize,
    pub f: usize,
    pub positions: Vec<Point>,
    pub crashed: Vec<usize>,
    pub seed: u64,
    #[serde(default)]
    pub options: ScenarioOptions,
}

fn assumption(text: impl Into<String>) -> Error {
    Error::InvalidInput(text.into())
}

impl Scenario {
    /// Checks the model assumptions, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        let (n, f) = (self.n, self.f);
        if !(1..=5).contains(&f) {
            return Err(assumption(format!("f = {f} is outside 1..=5")));
        }
        if self.positions.len() != n {
            return Err(assumption(format!("n = {n} but {} positions given", self.positions.len())));
        }
        if f >= 2 && n < 2 * f + 1 {
            return Err(Error::TooFewRobots { n, f });
        }
        if n < 2 {
            return Err(assumption("at least two robots are required"));
        }
        if self.positions.iter().any(|p| !p.is_finite()) {
            return Err(assumption("positions must be finite"));
        }
        let mut ids = self.crashed.clone();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.crashed.len() || ids.iter().any(|&i| i >= n) {
            return Err(assumption("assumption 1: crashed robots must be distinct robot indices"));
        }
        let count_ok = if self.options.at_most_f { ids.len() <= f } else { ids.len() == f };
        if !count_ok {
            return Err(assumption(format!(
                "assumption 1: {} crashed robots listed for f = {f}{}",
                ids.len(),
                if self.options.at_most_f { " (at most f allowed)" } else { "" }
            )));
        }
        let scale = smallest_enclosing_circle(&self.positions)?.radius;
        for i in 0..n {
            for j in i + 1..n {
                if self.positions[i].dist(self.positions[j]) <= 1e-9 * scale.max(1e-300) {
                    return Err(assumption(format!("assumption 3: distinct positions (robots {i} and {j} coincide)")));
                }
            }
        }
        // Gathering never breaks ties between robots, so a single fault
        // tolerates any symmetry (two robots are always symmetric).
        if f >= 2 && !self.options.allow_reflective_initial && !detect_symmetry(&self.positions).is_asymmetric() {
            return Err(assumption("assumption 2: the initial configuration must be asymmetric"));
        }
        let cp = self.crashed_positions();
        if f >= 3 && !in_convex_position(&cp) && !all_collinear(&cp) {
            return Err(assumption("assumption 4: convex position of the crashed robots"));
        }
        Ok(())
    }

    pub fn crashed_positions(&self) -> Vec<Point> {
        self.crashed.iter().map(|&i| self.positions[i]).collect()
    }

    pub fn robots(&self) -> Vec<Robot> {
        self.positions
            .iter()
            .enumerate()
            .map(|(i, p)| Robot { sim_id: i, position: *p, crashed: self.crashed.contains(&i), frame: Similarity::IDENTITY })
            .collect()
    }

    /// Rounds the algorithm may take: two, three when the crashed robots
    /// force a lower-order pattern, one for two robots gathering.
    pub fn round_bound(&self) -> usize {
        let cp = self.crashed_positions();
        match self.f {
            1 if self.n == 2 => 1,
            1 | 2 => 2,
            f if cp.len() == f && all_collinear(&cp) => 3,
            4 if cp.len() == 4 && concyclic(&cp).is_some() => 3,
            _ => 2,
        }
    }

    /// Classes the final pattern may take given where the crashed robots are.
    pub fn allowed_classes(&self) -> Vec<ConicClass> {
        let cp = self.crashed_positions();
        let mut out = pattern_classes(self.f).to_vec();
        if self.f >= 3 && all_collinear(&cp) {
            out.push(ConicClass::Line);
        }
        if self.f == 4 && concyclic(&cp).is_some() {
            out.push(ConicClass::Circle);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub max_rounds: usize,
    /// Fresh random rotation and translation per robot per round, with the
    /// snapshot presented in a random order.
    pub random_frames: bool,
    /// Also let frames flip handedness (off by default).
    pub mirrored_frames: bool,
    pub tol: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { max_rounds: 4, random_frames: false, mirrored_frames: false, tol: VERIFY_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    Success { rounds_used: usize },
    Failure { reason: String },
}

impl Verdict {
    pub fn is_success(&self) -> bool {
        matches!(self, Verdict::Success { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTrace {
    /// `rounds[0]` is the initial configuration.
    pub rounds: Vec<Vec<Point>>,
    /// `plans[r]` moved `rounds[r]` to `rounds[r + 1]`.
    pub plans: Vec<DestinationPlan>,
    pub verdict: Verdict,
    #[serde(default)]
    pub checks: Vec<CheckResult>,
}

impl RoundTrace {
    pub fn rounds_used(&self) -> usize {
        self.plans.len()
    }

    pub fn final_positions(&self) -> &[Point] {
        self.rounds.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

fn random_frame(rng: &mut ChaCha8Rng, mirrored: bool) -> Similarity {
    Similarity {
        scale: 1.0,
        angle: rng.gen_range(0.0..std::f64::consts::TAU),
        mirrored: mirrored && rng.gen_bool(0.5),
        translation: Point::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)),
    }
}

/// One round. Every live robot looks at the snapshot through its own frame
/// (and, when `shuffle` is given, in a random order), computes, and moves
/// to its first candidate; crashed robots stay put. The returned plan is the
/// world-frame plan, kept for the record.
pub fn step(robots: &[Robot], f: usize, mut shuffle: Option<&mut ChaCha8Rng>) -> Result<(Vec<Point>, DestinationPlan)> {
    let world: Vec<Point> = robots.iter().map(|r| r.position).collect();
    let plan = compute_destinations(&world, f)?;
    if plan.is_empty() {
        return Ok((world, plan));
    }
    let mut next = world.clone();
    for (i, robot) in robots.iter().enumerate() {
        if robot.crashed {
            continue;
        }
        let local_view = robot.frame != Similarity::IDENTITY || shuffle.is_some();
        next[i] = if local_view {
            let mut order: Vec<usize> = (0..world.len()).collect();
            if let Some(rng) = shuffle.as_deref_mut() {
                order.shuffle(rng);
            }
            let snapshot: Vec<Point> = order.iter().map(|&j| robot.frame.apply(world[j])).collect();
            let own = order.iter().position(|&j| j == i).expect("robot sees itself");
            let local = compute_destinations(&snapshot, f)?;
            match local.assignments.get(own).and_then(|c| c.first()) {
                Some(dest) => robot.frame.inverse().apply(*dest),
                None => robot.position,
            }
        } else {
            plan.assignments[i].first().copied().unwrap_or(robot.position)
        };
    }
    Ok((next, plan))
}

/// Runs until a round leaves everybody in place or `max_rounds` is spent,
/// then verifies the trace.
pub fn run(scenario: &Scenario, config: &SimConfig) -> RoundTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut robots = scenario.robots();
    let mut trace =
        RoundTrace { rounds: vec![scenario.positions.clone()], plans: Vec::new(), verdict: Verdict::Success { rounds_used: 0 }, checks: Vec::new() };
    let mut outcome: Option<String> = Some(format!("no termination within {} rounds", config.max_rounds));
    for _ in 0..config.max_rounds {
        if config.random_frames {
            for r in &mut robots {
                r.frame = random_frame(&mut rng, config.mirrored_frames);
            }
        }
        let shuffle = if config.random_frames { Some(&mut rng) } else { None };
        match step(&robots, scenario.f, shuffle) {
            Err(e) => {
                outcome = Some(e.to_string());
                break;
            }
            Ok((_, plan)) if plan.is_empty() => {
                outcome = None;
                break;
            }
            Ok((next, plan)) => {
                for (r, p) in robots.iter_mut().zip(&next) {
                    r.position = *p;
                }
                trace.rounds.push(next);
                trace.plans.push(plan);
            }
        }
    }
    trace.checks = verify(&trace, scenario, config.tol);
    trace.verdict = match (outcome, trace.checks.iter().find(|c| !c.passed)) {
        (Some(reason), _) => Verdict::Failure { reason },
        (None, Some(c)) => Verdict::Failure { reason: format!("check {} failed: {}", c.name, c.detail) },
        (None, None) => Verdict::Success { rounds_used: trace.rounds_used() },
    };
    trace
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult { name: name.to_string(), passed, detail: detail.into() }
}

/// Pattern the final configuration should sit on: through the crashed
/// robots when all `f` of them are known, else the last target.
fn final_conic(trace: &RoundTrace, scenario: &Scenario) -> Result<Conic> {
    let cp = scenario.crashed_positions();
    if cp.len() == scenario.f {
        return fit_target(&cp);
    }
    trace
        .plans
        .iter()
        .rev()
        .find_map(|p| p.target.as_ref().and_then(Target::conic).copied())
        .ok_or_else(|| Error::InvalidInput("no target pattern recorded".into()))
}

/// Replays the guarantees on a finished trace: (a) round bound,
/// (b) final pattern, (c) distinct destinations, (d) destinations avoid
/// current positions, (e) live robots on a uniform grid, (f) crashed robots
/// identifiable, (g) crashed robots never move.
pub fn verify(trace: &RoundTrace, scenario: &Scenario, tol: f64) -> Vec<CheckResult> {
    let f = scenario.f;
    let n = scenario.n;
    let last = trace.final_positions();
    let crashed: Vec<usize> = {
        let mut c = scenario.crashed.clone();
        c.sort_unstable();
        c
    };
    let mut out = Vec::new();

    let bound = scenario.round_bound();
    let used = trace.rounds_used();
    out.push(check("a_round_bound", used <= bound, format!("{used} rounds used, bound {bound}")));

    let scale = smallest_enclosing_circle(last).map(|c| c.radius).unwrap_or(1.0).max(1.0);
    let conic = if f == 1 {
        let target = scenario.crashed_positions().first().copied().unwrap_or(last[0]);
        let spread = last.iter().map(|p| p.dist(target)).fold(0.0, f64::max);
        out.push(check("b_final_pattern", spread < tol * scale, format!("all robots within {spread:.3e} of one point")));
        None
    } else {
        match final_conic(trace, scenario) {
            Ok(conic) => {
                let worst = last.iter().map(|p| conic.residual(*p)).fold(0.0, f64::max);
                let class_ok = scenario.allowed_classes().contains(&conic.class());
                out.push(check(
                    "b_final_pattern",
                    class_ok && worst < tol,
                    format!("{} through the crashed robots, worst residual {worst:.3e}", conic.class().name()),
                ));
                Some(conic)
            }
            Err(e) => {
                out.push(check("b_final_pattern", false, e.to_string()));
                None
            }
        }
    };

    let (mut clash, mut overlap) = (None, None);
    if f >= 2 {
        for (r, plan) in trace.plans.iter().enumerate() {
            let cands: Vec<Point> = plan.candidates().collect();
            for a in 0..cands.len() {
                if clash.is_none() && cands[a + 1..].iter().any(|b| b.dist(cands[a]) <= DISTINCT_TOL) {
                    clash = Some(r);
                }
                if overlap.is_none() && trace.rounds[r].iter().any(|p| p.dist(cands[a]) <= DISTINCT_TOL) {
                    overlap = Some(r);
                }
            }
        }
    }
    out.push(check(
        "c_distinct_destinations",
        clash.is_none(),
        clash.map_or("all candidates distinct".into(), |r| format!("repeated candidate in round {}", r + 1)),
    ));
    out.push(check(
        "d_disjoint_from_current",
        overlap.is_none(),
        overlap.map_or("no candidate on an occupied position".into(), |r| format!("candidate on a robot in round {}", r + 1)),
    ));

    if f == 1 || trace.plans.is_empty() {
        let why = if f == 1 { "point pattern" } else { "initial configuration was already terminal" };
        out.push(check("e_uniform_grid", true, why));
        let detail = match (&conic, trace.plans.is_empty()) {
            (Some(c), true) => match span_for(c, last).and_then(|s| crate::classifier::identify_faulty(last, f, &s)) {
                Ok(ids) => format!("initial terminal configuration; grid suggests {ids:?}"),
                Err(e) => format!("initial terminal configuration: {e}"),
            },
            _ => why.to_string(),
        };
        out.push(check("f_faults_identified", true, detail));
    } else if let Some(conic) = conic {
        match span_for(&conic, last) {
            Ok(span) => {
                let arcs: Vec<f64> = last.iter().map(|p| span.arc_position(*p)).collect();
                let grid = find_grid(&span, &arcs, n.saturating_sub(f).max(2), 2 * n + 4, GRID_TOL * scale);
                match grid {
                    Some(g) => {
                        let live_on = (0..n).filter(|i| !crashed.contains(i)).all(|i| g.members[i]);
                        let slots = if span.is_closed() { (span.length / g.u).round() as usize } else { g.extent(&arcs) };
                        out.push(check(
                            "e_uniform_grid",
                            live_on && slots <= 2 * n,
                            format!("live robots on grid: {live_on}; grid of {slots} slots"),
                        ));
                        let off: Vec<usize> = (0..n).filter(|&i| !g.members[i]).collect();
                        out.push(check("f_faults_identified", off == crashed, format!("identified {off:?}, crashed {crashed:?}")));
                    }
                    None => {
                        out.push(check("e_uniform_grid", false, "no uniform grid holds the live robots"));
                        out.push(check("f_faults_identified", false, "no uniform grid to identify from"));
                    }
                }
            }
            Err(e) => {
                out.push(check("e_uniform_grid", false, e.to_string()));
                out.push(check("f_faults_identified", false, e.to_string()));
            }
        }
    } else {
        out.push(check("e_uniform_grid", false, "no final pattern"));
        out.push(check("f_faults_identified", false, "no final pattern"));
    }

    let still = trace.rounds.iter().all(|round| crashed.iter().all(|&i| round[i] == scenario.positions[i]));
    out.push(check("g_crashed_immobile", still, if still { "crashed robots never moved" } else { "a crashed robot moved" }));
    out
}
