//! Scenario generation, batch runs, trace files and SVG rendering on top of
//! the `conic_forge` core.

pub mod batch;
pub mod gen;
pub mod io;
pub mod render;

pub use gen::{generate, modes_for, GenError, GenOptions, Mode};
