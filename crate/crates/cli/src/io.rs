//! JSON scenario and trace files.

use std::fs;
use std::path::Path;

use conic_forge::sim::{RoundTrace, Scenario, SimConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid scenario in {path}: {reason}")]
    Invalid { path: String, reason: String },
}

/// A finished run with everything needed to replay or render it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub scenario: Scenario,
    pub config: SimConfig,
    pub trace: RoundTrace,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, IoError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read {
        path: shown.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: shown,
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(value).expect("plain data serializes");
    fs::write(path, text + "\n").map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a scenario and checks the model assumptions.
pub fn load_scenario(path: &Path) -> Result<Scenario, IoError> {
    let s: Scenario = read_json(path)?;
    s.validate().map_err(|e| IoError::Invalid {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    Ok(s)
}

pub fn save_scenario(path: &Path, scenario: &Scenario) -> Result<(), IoError> {
    write_json(path, scenario)
}

pub fn load_trace(path: &Path) -> Result<TraceFile, IoError> {
    read_json(path)
}

pub fn save_trace(path: &Path, trace: &TraceFile) -> Result<(), IoError> {
    write_json(path, trace)
}
