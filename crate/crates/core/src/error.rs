use thiserror::Error;

/// Errors raised by the geometry kernel and the formation algorithm.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("arc length {s} outside span [0, {length}]")]
    OutOfRange { s: f64, length: f64 },
    #[error("conics are identical")]
    IdenticalConics,
    #[error("configuration is symmetric and cannot be ordered")]
    SymmetricConfiguration,
    #[error("too few robots: at least 2f+1 robots are required (n = {n}, f = {f})")]
    TooFewRobots { n: usize, f: usize },
    #[error("unsupported symmetric configuration: {0}")]
    UnsupportedSymmetry(String),
    #[error("no collision-free uniform grid on the target pattern")]
    NoValidGrid,
    #[error("faulty robots cannot be identified: {0}")]
    Unidentifiable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
