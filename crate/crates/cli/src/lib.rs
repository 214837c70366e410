//! Experiment driver for the MGIG samplers: sampler benchmarks, acceptance
//! rate grids and the two model simulations, all driven by a TOML config and
//! written as CSV / JSON-lines with a manifest.

pub mod aar;
pub mod benchmark;
pub mod config;
pub mod error;
pub mod mst;
mod output;
pub mod pggm;

use std::path::PathBuf;

pub use config::{Command, Config};
pub use error::{CliError, Result};
pub use output::{CellRecord, CSV_SCHEMA};

/// What a run wrote.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub n_cells: usize,
    pub n_failed: usize,
}

/// Validates `cfg`, runs its command and writes all outputs under
/// `cfg.output_dir`. Fails with [`CliError::AllCellsFailed`] after writing
/// if no cell succeeded.
pub fn run(cfg: &Config) -> Result<RunReport> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let go = || match cfg.command()? {
        Command::Benchmark => benchmark::run_benchmark(cfg),
        Command::Aar => aar::run_aar(cfg),
        Command::PggmSim => pggm::run_pggm_sim(cfg),
        Command::MstSim => mst::run_mst_sim(cfg),
    };
    let report = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(go)?,
        None => go()?,
    };
    if report.n_cells > 0 && report.n_failed == report.n_cells {
        return Err(CliError::AllCellsFailed(report.n_cells));
    }
    Ok(report)
}
