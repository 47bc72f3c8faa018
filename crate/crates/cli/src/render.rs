//! SVG snapshots of a trace, one per round.
//!
//! Robots are filled dots (crashed ones red), candidate destinations are
//! hollow circles, the pattern the robots currently share is solid and the
//! target pattern dashed. Intersections of the two are drawn as crosses.

use std::fmt::Write as _;

use conic_forge::geometry::{Conic, Point};
use conic_forge::sim::Scenario;

use crate::io::TraceFile;

const SIZE: f64 = 640.0;
/// Cells per side of the contouring grid.
const CELLS: usize = 240;

/// World-to-pixel mapping with y flipped so up is up.
#[derive(Clone, Copy, Debug)]
pub struct View {
    min: Point,
    scale: f64,
}

impl View {
    /// Fits every point with a margin.
    pub fn fit(points: &[Point]) -> View {
        let (mut lo, mut hi) = (
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !lo.x.is_finite() {
            return View {
                min: Point::new(-1.0, -1.0),
                scale: SIZE / 2.0,
            };
        }
        let side = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9) * 1.2;
        let mid = lo.midpoint(hi);
        View {
            min: Point::new(mid.x - side / 2.0, mid.y - side / 2.0),
            scale: SIZE / side,
        }
    }

    pub fn px(&self, p: Point) -> (f64, f64) {
        (
            (p.x - self.min.x) * self.scale,
            SIZE - (p.y - self.min.y) * self.scale,
        )
    }

    fn world(&self, x: f64, y: f64) -> Point {
        Point::new(
            self.min.x + x / self.scale,
            self.min.y + (SIZE - y) / self.scale,
        )
    }
}

/// Zero set of `conic` inside the view as an SVG path, by marching squares.
/// Clipping comes for free since only visible cells are visited.
pub fn conic_path(conic: &Conic, view: &View) -> String {
    let step = SIZE / CELLS as f64;
    let value = |i: usize, j: usize| conic.eval(view.world(i as f64 * step, j as f64 * step));
    let grid: Vec<Vec<f64>> = (0..=CELLS)
        .map(|i| (0..=CELLS).map(|j| value(i, j)).collect())
        .collect();
    let mut d = String::new();
    for i in 0..CELLS {
        for j in 0..CELLS {
            let corners = [
                (i as f64, j as f64, grid[i][j]),
                (i as f64 + 1.0, j as f64, grid[i + 1][j]),
                (i as f64 + 1.0, j as f64 + 1.0, grid[i + 1][j + 1]),
                (i as f64, j as f64 + 1.0, grid[i][j + 1]),
            ];
            let mut hits = Vec::with_capacity(4);
            for k in 0..4 {
                let (x0, y0, v0) = corners[k];
                let (x1, y1, v1) = corners[(k + 1) % 4];
                if (v0 < 0.0) != (v1 < 0.0) {
                    let t = v0 / (v0 - v1);
                    hits.push(((x0 + t * (x1 - x0)) * step, (y0 + t * (y1 - y0)) * step));
                }
            }
            for pair in hits.chunks_exact(2) {
                let _ = write!(
                    d,
                    "M{:.2} {:.2}L{:.2} {:.2}",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                );
            }
        }
    }
    d
}

/// The SVG for the configuration before round `round` (0-based), with that
/// round's plan overlaid when there is one.
pub fn render_round(file: &TraceFile, round: usize) -> String {
    let trace = &file.trace;
    let scenario: &Scenario = &file.scenario;
    let positions = &trace.rounds[round];
    let plan = trace.plans.get(round);

    let mut extent: Vec<Point> = trace.rounds.iter().flatten().copied().collect();
    if let Some(p) = plan {
        extent.extend(p.candidates());
    }
    let view = View::fit(&extent);
    let r = SIZE / 160.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    let title = match plan {
        Some(p) => format!(
            "round {} of {}: {}",
            round + 1,
            trace.plans.len(),
            p.class.label()
        ),
        None => format!("final configuration after {} rounds", trace.plans.len()),
    };
    let _ = writeln!(
        svg,
        r#"<text x="8" y="18" font-family="sans-serif" font-size="13">{title}</text>"#
    );

    if let Some(p) = plan {
        if let Some(c) = &p.current {
            let _ = writeln!(
                svg,
                r##"<path d="{}" fill="none" stroke="#555" stroke-width="1.2"/>"##,
                conic_path(c, &view)
            );
        }
        if let Some(c) = p.target.as_ref().and_then(|t| t.conic()) {
            let _ = writeln!(
                svg,
                r##"<path d="{}" fill="none" stroke="#1565c0" stroke-width="1.2" stroke-dasharray="6 4"/>"##,
                conic_path(c, &view)
            );
        }
        for x in &p.intersections {
            let (cx, cy) = view.px(*x);
            let s = r * 1.6;
            let _ = writeln!(
                svg,
                r##"<path d="M{} {}L{} {}M{} {}L{} {}" stroke="#6a1b9a" stroke-width="1.5"/>"##,
                cx - s,
                cy - s,
                cx + s,
                cy + s,
                cx - s,
                cy + s,
                cx + s,
                cy - s
            );
        }
        for d in p.candidates() {
            let (cx, cy) = view.px(d);
            let _ = writeln!(
                svg,
                r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="none" stroke="#2e7d32"/>"##
            );
        }
    } else if let Some(c) = trace
        .plans
        .iter()
        .rev()
        .find_map(|p| p.target.as_ref().and_then(|t| t.conic()))
    {
        let _ = writeln!(
            svg,
            r##"<path d="{}" fill="none" stroke="#555" stroke-width="1.2"/>"##,
            conic_path(c, &view)
        );
    }

    for (i, p) in positions.iter().enumerate() {
        let (cx, cy) = view.px(*p);
        let fill = if scenario.crashed.contains(&i) {
            "#c62828"
        } else {
            "#212121"
        };
        let _ = writeln!(
            svg,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}"/>"#
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// One SVG per recorded configuration: `rounds + 1` images.
pub fn render_all(file: &TraceFile) -> Vec<String> {
    (0..file.trace.rounds.len())
        .map(|r| render_round(file, r))
        .collect()
}
