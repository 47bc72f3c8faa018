pub mod classifier;
pub mod error;
pub mod formation;
pub mod geometry;
pub mod sim;
pub mod symmetry;

pub use error::{Error, Result};
