//! Sampler benchmark over `p × scenario × sampler × replicate`.

use mgig_core::diagnostics::ess_matrix_chain;
use mgig_core::mgig::{sample_chain, MgigParams};

use crate::config::{Config, Scenario, SamplerName};
use crate::error::Result;
use crate::output::{cell_stream, csv_writer, num, run_cells, timing, write_manifest, CellRecord, CELL_FAMILY};
use crate::RunReport;

pub const RESULTS_HEADER: [&str; 9] = [
    "sampler",
    "p",
    "scenario",
    "replicate",
    "mean_ess",
    "ess_per_sec",
    "wall_s",
    "accept_rate",
    "status",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sampler: SamplerName,
    pub p: usize,
    pub scenario: &'static str,
    pub replicate: usize,
    pub mean_ess: f64,
    pub ess_per_second: f64,
    pub wall_seconds: f64,
    pub acceptance_rate: f64,
    /// `ok`, `degenerate` when some entry never moved, or `error: …`.
    pub status: String,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

struct Cell<'a> {
    p: usize,
    scenario: &'a Scenario,
    sampler: SamplerName,
    replicate: usize,
}

/// Runs the grid without touching the filesystem.
pub fn benchmark_rows(cfg: &Config) -> Result<(Vec<ResultRow>, Vec<CellRecord>)> {
    let b = cfg.benchmark();
    let mut grid = Vec::new();
    for &p in &b.dims {
        for scenario in &b.scenarios {
            for &sampler in &b.samplers {
                for replicate in 0..cfg.replicates {
                    grid.push(Cell {
                        p,
                        scenario,
                        sampler,
                        replicate,
                    });
                }
            }
        }
    }
    let records = grid
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let label = format!("{}/p={}/{}/rep={}", c.sampler, c.p, c.scenario.label(), c.replicate);
            CellRecord::new(k, label, &cell_stream(cfg.seed, CELL_FAMILY, k))
        })
        .collect();
    let rows = run_cells(grid.len(), |k| {
        let c = &grid[k];
        let mut rng = cell_stream(cfg.seed, CELL_FAMILY, k);
        let outcome = (|| {
            let (psi, gamma) = c.scenario.psi_gamma(c.p).map_err(|e| mgig_core::Error::InvalidParams(e.to_string()))?;
            let params = MgigParams::new(b.lambda, psi, gamma)?;
            let chain = sample_chain(&params, c.sampler.kind(b.rho), b.n_iter, b.burn_in, b.thin, &mut rng, None)?;
            let report = ess_matrix_chain(&chain)?;
            Ok::<_, mgig_core::Error>((chain.acceptance_rate(), report))
        })();
        let mut row = ResultRow {
            sampler: c.sampler,
            p: c.p,
            scenario: c.scenario.label(),
            replicate: c.replicate,
            mean_ess: f64::NAN,
            ess_per_second: f64::NAN,
            wall_seconds: f64::NAN,
            acceptance_rate: f64::NAN,
            status: String::new(),
        };
        match outcome {
            Ok((acc, report)) => {
                row.mean_ess = report.mean_ess;
                row.ess_per_second = report.ess_per_second;
                row.wall_seconds = report.wall_seconds;
                row.acceptance_rate = acc;
                row.status = if report.degenerate.iter().any(|&d| d) { "degenerate" } else { "ok" }.into();
            }
            Err(e) => {
                log::warn!("cell {k} failed: {e}");
                row.status = format!("error: {e}");
            }
        }
        row
    });
    Ok((rows, records))
}

pub fn run_benchmark(cfg: &Config) -> Result<RunReport> {
    let (rows, records) = benchmark_rows(cfg)?;
    let path = cfg.output_dir.join("results.csv");
    let mut w = csv_writer(&path, &RESULTS_HEADER)?;
    for r in &rows {
        w.write_record([
            r.sampler.to_string(),
            r.p.to_string(),
            r.scenario.to_string(),
            r.replicate.to_string(),
            num(r.mean_ess),
            timing(r.ess_per_second, cfg.record_timing),
            timing(r.wall_seconds, cfg.record_timing),
            num(r.acceptance_rate),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    let files = vec![path];
    let manifest = write_manifest(&cfg.output_dir, cfg, &records, &files)?;
    let n_failed = rows.iter().filter(|r| r.status.starts_with("error")).count();
    Ok(RunReport {
        files: [files, vec![manifest]].concat(),
        n_cells: rows.len(),
        n_failed,
    })
}
