//! Run directories: config snapshot, metrics CSV, field snapshots and summary.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bench::{CaseReport, Series, StepView, Verdict};
use crate::config::RunConfig;
use crate::error::{Error, Result};

pub const CONFIG_FILE: &str = "config.toml";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.json";

/// Writes one run directory. Field snapshots are taken every `cadence`
/// steps; a cadence of 0 disables them.
pub struct RunWriter {
    dir: PathBuf,
    cadence: usize,
    snapshots: Vec<PathBuf>,
    error: Option<Error>,
}

impl RunWriter {
    /// Creates `dir` and stores the exact configuration used.
    pub fn create(dir: impl Into<PathBuf>, config: &RunConfig) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(CONFIG_FILE);
        fs::write(&path, config.to_toml()).map_err(|e| Error::io(&path, e))?;
        Ok(RunWriter { dir, cadence: config.output.cadence, snapshots: Vec::new(), error: None })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn snapshots(&self) -> &[PathBuf] {
        &self.snapshots
    }

    /// Step observer; the first I/O failure is kept and returned by `finish`.
    pub fn observe(&mut self, view: StepView<'_>) {
        if self.cadence == 0 || !view.step.is_multiple_of(self.cadence) || self.error.is_some() {
            return;
        }
        let path = self.dir.join(format!("field_{:06}.vtk", view.step));
        let result = File::create(&path).and_then(|f| {
            view.grid.write_vtk(BufWriter::new(f), &[("velocity", &view.flow.u), ("pressure", &view.flow.p)])
        });
        match result {
            Ok(()) => self.snapshots.push(path),
            Err(e) => self.error = Some(Error::io(path, e)),
        }
    }

    /// Writes the metrics CSV and the summary.
    pub fn finish(self, report: &CaseReport) -> Result<PathBuf> {
        if let Some(e) = self.error {
            return Err(e);
        }
        write_series(self.dir.join(METRICS_FILE), &report.series)?;
        let path = self.dir.join(SUMMARY_FILE);
        let summary = Summary { verdict: report.verdict(), report };
        let text = serde_json::to_string_pretty(&summary).expect("summary serializes to JSON");
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(self.dir)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    verdict: Verdict,
    #[serde(flatten)]
    report: &'a CaseReport,
}

/// CSV with a header row and shortest round-trip floats.
pub fn write_series(path: impl AsRef<Path>, series: &Series) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(&series.columns).map_err(csv_err)?;
    for row in &series.rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_series(path: impl AsRef<Path>) -> Result<Series> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let columns = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let rows = r.deserialize().collect::<std::result::Result<Vec<Vec<f64>>, _>>().map_err(csv_err)?;
    Ok(Series { columns, rows })
}

/// Writes rows of a serializable table as CSV.
pub fn write_table<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
