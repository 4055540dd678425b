//! Reproducible experiment runner on top of `rwre-core`.
//!
//! A run is fully described by a [`RunConfig`] (TOML or JSON, seed required).
//! Its [`RunRecord`] embeds that config, so `replay` can rerun it and check
//! the results bit for bit.

pub mod config;
pub mod record;
mod run;

pub use config::{parse_law, Experiment, RunConfig, SweepParameter};
pub use record::{render, write_atomic, Cell, Format, Metric, RunRecord, Table};
pub use run::run;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
}

impl CliError {
    pub(crate) fn config<E: std::fmt::Display>(e: E) -> Self {
        CliError::Config(e.to_string())
    }

    /// 2 for bad input, 3 for failures while running, 4 for a replay mismatch.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 3,
            CliError::ReplayMismatch(_) => 4,
        }
    }
}

/// Reruns the config embedded in `stored` and compares everything except
/// wall time. Returns the fresh record.
pub fn replay(stored: &RunRecord) -> Result<RunRecord, CliError> {
    let fresh = run(&stored.config)?;
    let a = serde_json::to_value(stored).expect("records serialize");
    let b = serde_json::to_value(&fresh).expect("records serialize");
    if a == b {
        return Ok(fresh);
    }
    let mut diffs = Vec::new();
    for (name, m) in &stored.metrics {
        match fresh.metrics.get(name) {
            Some(n) if n == m => {}
            Some(n) => diffs.push(format!("{name}: {} -> {}", m.value, n.value)),
            None => diffs.push(format!("{name}: missing")),
        }
    }
    for (name, t) in &stored.tables {
        if fresh.tables.get(name) != Some(t) {
            diffs.push(format!("table {name} differs"));
        }
    }
    if stored.version != fresh.version || stored.scheme != fresh.scheme {
        diffs.push(format!("version/scheme {}/{} -> {}/{}", stored.version, stored.scheme, fresh.version, fresh.scheme));
    }
    if diffs.is_empty() {
        diffs.push("record fields differ".into());
    }
    Err(CliError::ReplayMismatch(diffs.join("; ")))
}
