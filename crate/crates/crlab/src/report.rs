//! Command outcomes and their JSON/CSV emission.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use serde::Serialize;

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "CRLAB_OUT";

/// Output directory used when neither `--out` nor [`OUT_ENV`] is given.
pub const DEFAULT_OUT: &str = "crlab-out";

/// One verified property of a run.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    /// Short name.
    pub name: String,
    /// Measured value and the bound it was held to.
    pub detail: String,
    /// Whether the property holds.
    pub pass: bool,
}

impl Check {
    /// A check with a formatted detail string.
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), detail: detail.into(), pass }
    }
}

/// Rows of a CSV table. Cells are preformatted so that identical runs give
/// byte-identical files.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    /// Column names.
    pub headers: Vec<String>,
    /// Rows.
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Empty table with the given columns.
    pub fn new(headers: &[&str]) -> Self {
        Table { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row.
    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Formats a float for tables with a fixed number of significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// Result of one command.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    /// Command path, e.g. `lattice-density`.
    pub command: String,
    /// Configuration the run used.
    pub config: serde_json::Value,
    /// Verified properties.
    pub checks: Vec<Check>,
    /// Non-fatal remarks (regime flags, skipped legs).
    pub notes: Vec<String>,
    /// Scalar results.
    pub results: serde_json::Value,
    /// Tabular series.
    #[serde(skip)]
    pub table: Table,
    /// Wall-clock time (kept out of the CSV so that it stays deterministic).
    pub elapsed_seconds: f64,
}

impl Outcome {
    /// Whether every check passed.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Sets the elapsed time.
    pub fn with_elapsed(mut self, d: Duration) -> Self {
        self.elapsed_seconds = d.as_secs_f64();
        self
    }

    /// One-line summary of the checks.
    pub fn summary(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("{}{}: {}", if c.pass { "" } else { "✗ " }, c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// Writes `<dir>/<command>.json` and `<dir>/<command>.csv`.
    pub fn write(&self, dir: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let json = dir.join(format!("{}.json", self.command));
        let csv_path = dir.join(format!("{}.csv", self.command));
        std::fs::write(&json, serde_json::to_string_pretty(self)?)?;
        let mut w = csv::Writer::from_path(&csv_path)?;
        w.write_record(&self.table.headers)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok((json, csv_path))
    }
}

/// `--out`, else [`OUT_ENV`], else [`DEFAULT_OUT`].
pub fn output_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}
