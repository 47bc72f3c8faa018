//! Browser bindings for the demo page in `www/`.
//!
//! Everything crosses the boundary as JSON strings, which keeps the page
//! free of generated type glue beyond what wasm-bindgen emits.

use conic_forge::classifier::fit_target;
use conic_forge::geometry::Point;
use conic_forge::sim::{run, RoundTrace, Scenario, SimConfig, Verdict};
use conic_forge_cli::io::TraceFile;
use conic_forge_cli::render::{conic_path, render_round, View};
use conic_forge_cli::{generate, GenOptions, Mode};
use wasm_bindgen::prelude::*;

/// Half the side of the square the fit canvas shows, in world units.
pub const FIT_HALF_SIDE: f64 = 6.0;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// A scenario as JSON.
#[wasm_bindgen]
pub fn generate_scenario(f: usize, n: usize, seed: u64, mode: &str) -> Result<String, JsError> {
    let mode: Mode = mode.parse().map_err(js_err)?;
    let s = generate(f, n, seed, mode, GenOptions::default()).map_err(js_err)?;
    serde_json::to_string(&s).map_err(js_err)
}

/// Runs a scenario and returns the trace file as JSON.
#[wasm_bindgen]
pub fn simulate(scenario_json: &str, random_frames: bool) -> Result<String, JsError> {
    let scenario: Scenario = serde_json::from_str(scenario_json).map_err(js_err)?;
    scenario.validate().map_err(js_err)?;
    let config = SimConfig { random_frames, ..SimConfig::default() };
    let trace = run(&scenario, &config);
    serde_json::to_string(&TraceFile { scenario, config, trace }).map_err(js_err)
}

/// SVG of configuration `round` of a trace file.
#[wasm_bindgen]
pub fn render(trace_json: &str, round: usize) -> Result<String, JsError> {
    let file: TraceFile = serde_json::from_str(trace_json).map_err(js_err)?;
    if round >= file.trace.rounds.len() {
        return Err(js_err(format!("the trace has {} configurations", file.trace.rounds.len())));
    }
    Ok(render_round(&file, round))
}

/// SVG of a scenario's starting configuration.
#[wasm_bindgen]
pub fn preview(scenario_json: &str) -> Result<String, JsError> {
    let scenario: Scenario = serde_json::from_str(scenario_json).map_err(js_err)?;
    let trace = RoundTrace {
        rounds: vec![scenario.positions.clone()],
        plans: Vec::new(),
        verdict: Verdict::Success { rounds_used: 0 },
        checks: Vec::new(),
    };
    Ok(render_round(&TraceFile { scenario, config: SimConfig::default(), trace }, 0))
}

/// Pattern through 2 to 5 points as `{"class": .., "path": ..}`, the path
/// being SVG path data for a canvas showing the square of half side
/// [`FIT_HALF_SIDE`] around the origin.
#[wasm_bindgen]
pub fn fit(xs: Vec<f64>, ys: Vec<f64>) -> Result<String, JsError> {
    let points: Vec<Point> = xs.iter().zip(&ys).map(|(x, y)| Point::new(*x, *y)).collect();
    let conic = fit_target(&points).map_err(js_err)?;
    // View::fit pads by a fifth, so these corners give exactly the square.
    let c = FIT_HALF_SIDE / 1.2;
    let view = View::fit(&[Point::new(-c, -c), Point::new(c, c)]);
    let out = serde_json::json!({ "class": conic.class().name(), "path": conic_path(&conic, &view) });
    Ok(out.to_string())
}

#[wasm_bindgen]
pub fn fit_half_side() -> f64 {
    FIT_HALF_SIDE
}
