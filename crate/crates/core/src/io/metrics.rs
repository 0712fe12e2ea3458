//! Comma-separated training log, one line per finished epoch.

use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const METRICS_HEADER: &str =
    "run_id,phase,epoch,batches,current_loss,best_loss,windows_visited,elapsed_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Characteristic-function descent for one window vector.
    Fn,
    /// Window-vector descent.
    Win,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Fn => "fn",
            Phase::Win => "win",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    /// Must not contain commas or newlines.
    pub run_id: String,
    pub phase: Phase,
    pub epoch: usize,
    pub batches: usize,
    pub current_loss: f64,
    pub best_loss: f64,
    /// Only meaningful in the window phase.
    pub windows_visited: Option<usize>,
    pub elapsed_secs: f64,
}

impl MetricsRecord {
    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.3}",
            self.run_id,
            self.phase,
            self.epoch,
            self.batches,
            self.current_loss,
            self.best_loss,
            self.windows_visited
                .map(|v| v.to_string())
                .unwrap_or_default(),
            self.elapsed_secs
        )
    }
}

/// Appends `record`, writing the header first when the file is new or empty.
pub fn append_metrics(record: &MetricsRecord, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if record.run_id.contains([',', '\n']) {
        return Err(Error::InvalidParameter(format!(
            "run id {:?} contains a separator",
            record.run_id
        )));
    }
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let empty = file.metadata().map_err(|e| Error::io(path, e))?.len() == 0;
    let mut text = String::new();
    if empty {
        text.push_str(METRICS_HEADER);
        text.push('\n');
    }
    text.push_str(&record.to_line());
    text.push('\n');
    file.write_all(text.as_bytes())
        .map_err(|e| Error::io(path, e))
}
