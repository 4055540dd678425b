//! Self-describing results: the config that produced them plus metrics and tables.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rwre_core::rng::SUBSTREAM_SCHEME;
use rwre_core::stats::Estimate;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::CliError;

/// A table entry. Non-finite floats are kept as text so records survive a
/// JSON round trip unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    UInt(u64),
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::UInt(u) => Some(u as f64),
            Cell::Int(i) => Some(i as f64),
            Cell::Float(x) => Some(x),
            Cell::Text(ref s) => match s.as_str() {
                "inf" => Some(f64::INFINITY),
                "-inf" => Some(f64::NEG_INFINITY),
                "nan" => Some(f64::NAN),
                _ => None,
            },
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Float(x)
        } else if x.is_nan() {
            Cell::Text("nan".into())
        } else if x > 0.0 {
            Cell::Text("inf".into())
        } else {
            Cell::Text("-inf".into())
        }
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::UInt(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::UInt(x as u64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::UInt(x as u64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        if x >= 0 {
            Cell::UInt(x as u64)
        } else {
            Cell::Int(x)
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::UInt(u) => write!(f, "{u}"),
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => write!(f, "{x:?}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: Cell,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<Cell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
}

impl Metric {
    pub fn exact(value: impl Into<Cell>) -> Self {
        Metric { value: value.into(), std_error: None, n: None }
    }

    pub fn value(&self) -> f64 {
        self.value.as_f64().unwrap_or(f64::NAN)
    }

    pub fn std_error(&self) -> f64 {
        self.std_error.as_ref().and_then(Cell::as_f64).unwrap_or(0.0)
    }
}

impl From<Estimate> for Metric {
    fn from(e: Estimate) -> Self {
        Metric { value: e.mean.into(), std_error: Some(e.std_error.into()), n: Some(e.n) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub scheme: String,
    pub config: RunConfig,
    #[serde(default)]
    pub labels: BTreeMap<String, String>,
    #[serde(default)]
    pub metrics: BTreeMap<String, Metric>,
    #[serde(default)]
    pub tables: BTreeMap<String, Table>,
    /// Seconds spent in the run; not written to files, so reruns compare equal.
    #[serde(skip)]
    pub wall_time: Option<f64>,
}

impl RunRecord {
    pub fn new(config: RunConfig) -> Self {
        RunRecord {
            tool: "rwre".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            scheme: SUBSTREAM_SCHEME.into(),
            config,
            labels: BTreeMap::new(),
            metrics: BTreeMap::new(),
            tables: BTreeMap::new(),
            wall_time: None,
        }
    }

    pub fn metric(&mut self, name: &str, m: impl Into<Metric>) {
        self.metrics.insert(name.into(), m.into());
    }

    pub fn label(&mut self, name: &str, value: impl Into<String>) {
        self.labels.insert(name.into(), value.into());
    }

    pub fn table(&mut self, name: &str, t: Table) {
        self.tables.insert(name.into(), t);
    }

    pub fn get(&self, name: &str) -> Option<&Metric> {
        self.metrics.get(name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("record: {e}")))
    }

    /// Metrics as `name,value,std_error,n,seed,scheme`.
    pub fn metrics_csv(&self) -> String {
        let mut t = Table::new(&["name", "value", "std_error", "n"]);
        for (k, m) in &self.metrics {
            t.push(vec![
                k.as_str().into(),
                m.value.clone(),
                m.std_error.clone().unwrap_or(Cell::Text(String::new())),
                m.n.map(Cell::UInt).unwrap_or(Cell::Text(String::new())),
            ]);
        }
        for (k, v) in &self.labels {
            t.push(vec![k.as_str().into(), v.as_str().into(), Cell::Text(String::new()), Cell::Text(String::new())]);
        }
        self.table_csv(&t)
    }

    /// A table with `seed` and `scheme` columns appended to every row.
    pub fn table_csv(&self, t: &Table) -> String {
        let mut out = String::new();
        let esc = |s: &str| if s.contains([',', '"', '\n']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.to_owned() };
        let header: Vec<String> = t.columns.iter().map(|c| esc(c)).chain(["seed".into(), "scheme".into()]).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &t.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| esc(&c.to_string()))
                .chain([self.config.seed.to_string(), self.scheme.clone()])
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Writes through a temporary file in the same directory and renames it into
/// place. An existing file is an error unless `force`.
pub fn write_atomic(path: &Path, contents: &str, force: bool) -> Result<(), CliError> {
    if path.exists() && !force {
        return Err(CliError::Config(format!("{} exists; pass --force to overwrite", path.display())));
    }
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::Config(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(CliError::Io(format!("{}: {e}", path.display())));
    }
    Ok(())
}

/// Output files for `record`: the record itself as JSON, or in CSV mode one
/// file for the metrics and one per table, named `<stem>-<table>.csv`.
pub fn render(record: &RunRecord, out: &Path, format: Format) -> Vec<(PathBuf, String)> {
    match format {
        Format::Json => vec![(out.to_path_buf(), record.to_json())],
        Format::Csv => {
            let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
            let at = |suffix: &str| out.with_file_name(format!("{stem}-{suffix}.csv"));
            let mut files = vec![(at("metrics"), record.metrics_csv())];
            for (name, t) in &record.tables {
                files.push((at(name), record.table_csv(t)));
            }
            files
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;
    use rwre_core::env::EnvironmentLaw;

    fn record() -> RunRecord {
        let config = RunConfig {
            seed: u64::MAX,
            experiment: Experiment::Classify { law: EnvironmentLaw::deterministic(0.5).unwrap() },
        };
        let mut r = RunRecord::new(config);
        r.metric("inf", Metric::exact(f64::INFINITY));
        r.metric("est", Estimate { mean: 0.1, std_error: 0.01, n: 10 });
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![Cell::from(-3i64), Cell::from(f64::NAN)]);
        t.push(vec![Cell::from(u64::MAX), Cell::from(0.1 + 0.2)]);
        r.table("t", t);
        r.wall_time = Some(1.5);
        r
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = record();
        let back = RunRecord::from_json(&r.to_json()).unwrap();
        assert_eq!(back.to_json(), r.to_json());
        assert_eq!(back.wall_time, None);
        assert!(back.get("inf").unwrap().value().is_infinite());
    }

    #[test]
    fn csv_carries_seed_and_scheme() {
        let r = record();
        let csv = r.table_csv(&r.tables["t"]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x,y,seed,scheme");
        assert_eq!(lines.next().unwrap(), format!("-3,nan,{},{}", u64::MAX, SUBSTREAM_SCHEME));
    }

    #[test]
    fn atomic_write_refuses_existing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, "a", false).unwrap();
        assert!(matches!(write_atomic(&p, "b", false), Err(CliError::Config(_))));
        write_atomic(&p, "b", true).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
