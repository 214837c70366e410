//! Matrix skew-t simulation: for each `ν` and replicate, fit the skew-t
//! model and the restricted `B ≡ 0` (matrix-t) model to the same data and
//! compare posterior predictive losses.

use mgig_core::linalg::Spd;
use mgig_core::models::mst::{predictive_loss, run_mst, simulate_mst, MstChain, MstData, MstHyper, MstOptions};
use nalgebra::DMatrix;

use crate::config::{rows_to_matrix, Config};
use crate::error::Result;
use crate::output::{cell_stream, csv_writer, num, run_cells, timing, write_manifest, CellRecord, CELL_FAMILY, DATA_FAMILY};
use crate::RunReport;

pub const LOSS_HEADER: [&str; 6] = ["model", "nu", "replicate", "loss", "wall_s", "status"];
pub const B_HEADER: [&str; 7] = ["nu", "replicate", "row", "col", "truth", "mean", "sd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MstModel {
    /// Skew-t, `B` estimated.
    Mst,
    /// Matrix-t, `B ≡ 0`.
    Mt,
}

impl MstModel {
    pub fn name(&self) -> &'static str {
        match self {
            MstModel::Mst => "MST",
            MstModel::Mt => "MT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MstRow {
    pub model: MstModel,
    pub nu: f64,
    pub replicate: usize,
    pub loss: f64,
    pub wall_seconds: f64,
    /// Posterior mean and s.d. of `B`; `None` for the restricted model.
    pub b_moments: Option<(DMatrix<f64>, DMatrix<f64>)>,
    pub status: String,
}

pub fn mst_rows(cfg: &Config) -> Result<(Vec<MstRow>, Vec<CellRecord>, DMatrix<f64>)> {
    let c = cfg.mst();
    let m = rows_to_matrix("m", &c.m, c.p, c.q)?;
    let b = rows_to_matrix("b", &c.b, c.p, c.q)?;
    let (psi, omega) = (Spd::identity(c.p), Spd::identity(c.q));
    let reps = cfg.replicates;
    let datasets: Vec<std::result::Result<MstData, mgig_core::Error>> = c
        .nus
        .iter()
        .enumerate()
        .flat_map(|(v, &nu)| (0..reps).map(move |r| (v * reps + r, nu)))
        .map(|(k, nu)| simulate_mst(&m, &b, &psi, &omega, nu, c.n, &mut cell_stream(cfg.seed, DATA_FAMILY, k)))
        .collect();
    let mut grid = Vec::new();
    for v in 0..c.nus.len() {
        for r in 0..reps {
            for model in [MstModel::Mst, MstModel::Mt] {
                grid.push((v, r, model));
            }
        }
    }
    let records = grid
        .iter()
        .enumerate()
        .map(|(k, &(v, r, model))| {
            let label = format!("{}/nu={}/rep={r}", model.name(), c.nus[v]);
            CellRecord::new(k, label, &cell_stream(cfg.seed, CELL_FAMILY, k))
        })
        .collect();
    let rows = run_cells(grid.len(), |k| {
        let (v, rep, model) = grid[k];
        let nu = c.nus[v];
        let mut rng = cell_stream(cfg.seed, CELL_FAMILY, k);
        let outcome = (|| {
            let data = datasets[v * reps + rep].as_ref().map_err(|e| e.clone())?;
            let opts = MstOptions {
                w_update: c.w_sampler.kind(5.0),
                estimate_b: model == MstModel::Mst,
            };
            let chain: MstChain = run_mst(data, &MstHyper::weak(c.p, c.q, nu), opts, c.n_iter, c.burn_in, &mut rng)?;
            let loss = predictive_loss(&chain.states, data, &mut rng)?;
            Ok::<_, mgig_core::Error>((chain, loss))
        })();
        let status = crate::output::status_of(&outcome);
        let (loss, wall_seconds, b_moments) = match outcome {
            Ok((chain, loss)) => (
                loss,
                chain.wall_seconds,
                (model == MstModel::Mst).then(|| chain.b_moments()),
            ),
            Err(_) => (f64::NAN, f64::NAN, None),
        };
        MstRow {
            model,
            nu,
            replicate: rep,
            loss,
            wall_seconds,
            b_moments,
            status,
        }
    });
    Ok((rows, records, b))
}

pub fn run_mst_sim(cfg: &Config) -> Result<RunReport> {
    let (rows, records, truth) = mst_rows(cfg)?;
    let dir = &cfg.output_dir;
    let loss_path = dir.join("predictive_loss.csv");
    let mut w = csv_writer(&loss_path, &LOSS_HEADER)?;
    for r in &rows {
        w.write_record([
            r.model.name().to_string(),
            num(r.nu),
            r.replicate.to_string(),
            num(r.loss),
            timing(r.wall_seconds, cfg.record_timing),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    let b_path = dir.join("b_posterior.csv");
    let mut w = csv_writer(&b_path, &B_HEADER)?;
    for r in &rows {
        if let Some((mean, sd)) = &r.b_moments {
            for i in 0..mean.nrows() {
                for j in 0..mean.ncols() {
                    w.write_record([
                        num(r.nu),
                        r.replicate.to_string(),
                        (i + 1).to_string(),
                        (j + 1).to_string(),
                        num(truth[(i, j)]),
                        num(mean[(i, j)]),
                        num(sd[(i, j)]),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    let mut files = vec![loss_path, b_path];
    let manifest = write_manifest(dir, cfg, &records, &files)?;
    files.push(manifest);
    Ok(RunReport {
        files,
        n_cells: rows.len(),
        n_failed: rows.iter().filter(|r| r.status != "ok").count(),
    })
}
