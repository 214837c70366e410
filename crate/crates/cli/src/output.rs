//! Shared plumbing for the drivers: cell streams, the worker pool, number
//! formatting and the run manifest.

use std::path::{Path, PathBuf};

use mgig_core::random::RngStream;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::error::Result;

/// Stream families; every cell derives its own stream from one of these.
pub(crate) const DATA_FAMILY: u64 = 1;
pub(crate) const CELL_FAMILY: u64 = 2;

pub(crate) fn cell_stream(seed: u64, family: u64, index: usize) -> RngStream {
    RngStream::new(seed, family).derive(index as u64)
}

/// Runs `f` over `0..n` on the current rayon pool, keeping input order.
pub(crate) fn run_cells<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Shortest round-trip form, exponent notation for very small or large
/// magnitudes.
pub(crate) fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:?}")
    }
}

pub(crate) fn timing(x: f64, record: bool) -> String {
    if record {
        num(x)
    } else {
        "NA".into()
    }
}

pub(crate) fn status_of<T>(r: &std::result::Result<T, mgig_core::Error>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => format!("error: {e}"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellRecord {
    pub index: usize,
    pub label: String,
    pub seed: u64,
    pub stream_id: u64,
}

impl CellRecord {
    pub(crate) fn new(index: usize, label: String, rng: &RngStream) -> Self {
        Self {
            index,
            label,
            seed: rng.seed(),
            stream_id: rng.stream_id(),
        }
    }
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    csv_schema: u32,
    config: &'a Config,
    cells: &'a [CellRecord],
    files: Vec<String>,
}

/// Version of the CSV layouts; bumped whenever a column changes.
pub const CSV_SCHEMA: u32 = 1;

pub(crate) fn write_manifest(dir: &Path, cfg: &Config, cells: &[CellRecord], files: &[PathBuf]) -> Result<PathBuf> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        core_version: mgig_core::VERSION,
        csv_schema: CSV_SCHEMA,
        config: cfg,
        cells,
        files: files
            .iter()
            .map(|f| f.file_name().unwrap_or_default().to_string_lossy().into_owned())
            .collect(),
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(path)
}

pub(crate) fn csv_writer(path: &Path, header: &[&str]) -> Result<csv::Writer<std::fs::File>> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    Ok(w)
}
