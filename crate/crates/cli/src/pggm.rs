//! PGGM simulation: synthetic data per replicate, one chain per
//! `(scheme, replicate)` on shared data.

use std::io::Write;

use mgig_core::diagnostics::ess;
use mgig_core::models::pggm::{mse, run_pggm, simulate_pggm, OmegaUpdate, PggmChain, PggmData, PggmHyper, PggmTruth};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::{Config, SchemeName};
use crate::error::Result;
use crate::output::{cell_stream, csv_writer, num, run_cells, timing, write_manifest, CellRecord, CELL_FAMILY, DATA_FAMILY};
use crate::RunReport;

pub const SUMMARY_HEADER: [&str; 9] = [
    "scheme",
    "replicate",
    "mse_omega",
    "mse_delta",
    "mean_ess_omega",
    "ess_per_sec",
    "wall_s",
    "n_samples",
    "status",
];

#[derive(Debug, Clone, PartialEq)]
pub struct PggmRow {
    pub scheme: SchemeName,
    pub replicate: usize,
    pub mse_omega: f64,
    pub mse_delta: f64,
    pub mean_ess_omega: f64,
    pub ess_per_second: f64,
    pub wall_seconds: f64,
    pub n_samples: usize,
    /// MSE of the running posterior mean of `Ω` every `mse_every` draws.
    pub mse_path: Vec<(usize, f64)>,
    pub status: String,
}

#[derive(Debug, Serialize)]
struct TraceRecord {
    replicate: usize,
    iteration: usize,
    omega_11: f64,
    omega_12: f64,
    delta_14: f64,
    delta_24: f64,
}

fn update_of(s: SchemeName, scans: usize) -> OmegaUpdate {
    match s {
        SchemeName::GS => OmegaUpdate::Gs { scans },
        SchemeName::MH1 => OmegaUpdate::Mh1,
        SchemeName::HR => OmegaUpdate::Hr,
        SchemeName::MI => OmegaUpdate::Mi,
    }
}

fn omega_ess(chain: &PggmChain) -> std::result::Result<f64, mgig_core::Error> {
    let q = chain.states[0].omega.dim();
    let mut total = 0.0;
    for i in 0..q {
        for j in i..q {
            let s: Vec<f64> = chain.states.iter().map(|st| st.omega.as_matrix()[(i, j)]).collect();
            total += ess(&s)?.value;
        }
    }
    Ok(total / (q * (q + 1) / 2) as f64)
}

fn mse_path(chain: &PggmChain, truth: &DMatrix<f64>, every: usize) -> Vec<(usize, f64)> {
    let mut sum = DMatrix::zeros(truth.nrows(), truth.ncols());
    let mut out = Vec::new();
    for (t, s) in chain.states.iter().enumerate() {
        sum += s.omega.as_matrix();
        if (t + 1) % every == 0 {
            out.push((t + 1, mse(&(&sum / (t + 1) as f64), truth)));
        }
    }
    out
}

/// Rows plus, when traces are on, the retained chains of replicate 0.
pub type PggmOutput = (Vec<PggmRow>, Vec<CellRecord>, Vec<(SchemeName, PggmChain)>);

pub fn pggm_rows(cfg: &Config) -> Result<PggmOutput> {
    let g = cfg.pggm();
    let datasets: Vec<std::result::Result<(PggmData, PggmTruth), mgig_core::Error>> = (0..cfg.replicates)
        .map(|r| simulate_pggm(g.n, g.p, g.q, &mut cell_stream(cfg.seed, DATA_FAMILY, r)))
        .collect();
    let grid: Vec<(SchemeName, usize)> =
        g.schemes.iter().flat_map(|&s| (0..cfg.replicates).map(move |r| (s, r))).collect();
    let records = grid
        .iter()
        .enumerate()
        .map(|(k, (s, r))| CellRecord::new(k, format!("{s}/rep={r}"), &cell_stream(cfg.seed, CELL_FAMILY, k)))
        .collect();
    let hyper = PggmHyper::standard(g.q, g.p);
    let keep_traces = g.traces && g.q >= 2 && g.p >= 4;
    let results = run_cells(grid.len(), |k| {
        let (scheme, rep) = grid[k];
        let mut rng = cell_stream(cfg.seed, CELL_FAMILY, k);
        let outcome = (|| {
            let (data, truth) = datasets[rep].as_ref().map_err(|e| e.clone())?;
            let chain = run_pggm(data, &hyper, update_of(scheme, g.gs_scans), g.n_iter, g.burn_in, &mut rng)?;
            let ess_omega = omega_ess(&chain)?;
            Ok::<_, mgig_core::Error>((chain, truth.clone(), ess_omega))
        })();
        let mut row = PggmRow {
            scheme,
            replicate: rep,
            mse_omega: f64::NAN,
            mse_delta: f64::NAN,
            mean_ess_omega: f64::NAN,
            ess_per_second: f64::NAN,
            wall_seconds: f64::NAN,
            n_samples: 0,
            mse_path: Vec::new(),
            status: crate::output::status_of(&outcome),
        };
        let mut kept = None;
        if let Ok((chain, truth, ess_omega)) = outcome {
            row.mse_omega = mse(&chain.omega_mean(), truth.omega.as_matrix());
            row.mse_delta = mse(&chain.delta_mean(), &truth.delta);
            row.mean_ess_omega = ess_omega;
            row.wall_seconds = chain.wall_seconds;
            row.ess_per_second = ess_omega / chain.wall_seconds;
            row.n_samples = chain.states.len();
            row.mse_path = mse_path(&chain, truth.omega.as_matrix(), g.mse_every);
            if keep_traces && rep == 0 {
                kept = Some((scheme, chain));
            }
        }
        (row, kept)
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut traces = Vec::new();
    for (row, kept) in results {
        rows.push(row);
        traces.extend(kept);
    }
    Ok((rows, records, traces))
}

pub fn run_pggm_sim(cfg: &Config) -> Result<RunReport> {
    let (rows, records, traces) = pggm_rows(cfg)?;
    let dir = &cfg.output_dir;
    let summary = dir.join("pggm_summary.csv");
    let mut w = csv_writer(&summary, &SUMMARY_HEADER)?;
    for r in &rows {
        w.write_record([
            r.scheme.to_string(),
            r.replicate.to_string(),
            num(r.mse_omega),
            num(r.mse_delta),
            num(r.mean_ess_omega),
            timing(r.ess_per_second, cfg.record_timing),
            timing(r.wall_seconds, cfg.record_timing),
            r.n_samples.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    let path_file = dir.join("pggm_mse.csv");
    let mut w = csv_writer(&path_file, &["scheme", "replicate", "iteration", "mse_omega"])?;
    for r in &rows {
        for (t, m) in &r.mse_path {
            w.write_record([r.scheme.to_string(), r.replicate.to_string(), t.to_string(), num(*m)])?;
        }
    }
    w.flush()?;
    let mut files = vec![summary, path_file];
    for (scheme, chain) in &traces {
        let path = dir.join(format!("traces_{scheme}.jsonl"));
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        for (t, s) in chain.states.iter().enumerate() {
            let o = s.omega.as_matrix();
            let rec = TraceRecord {
                replicate: 0,
                iteration: t + 1,
                omega_11: o[(0, 0)],
                omega_12: o[(0, 1)],
                delta_14: s.delta[(0, 3)],
                delta_24: s.delta[(1, 3)],
            };
            serde_json::to_writer(&mut f, &rec)?;
            f.write_all(b"\n")?;
        }
        f.flush()?;
        files.push(path);
    }
    let manifest = write_manifest(dir, cfg, &records, &files)?;
    files.push(manifest);
    Ok(RunReport {
        files,
        n_cells: rows.len(),
        n_failed: rows.iter().filter(|r| r.status != "ok").count(),
    })
}
