//! Average acceptance rate of MH1 over an order grid (`Ψ = Γ = I`) and a
//! large-`Ψ` grid (`Ψ = diag(ψ, 1, …, 1)`, `Γ = I`).

use mgig_core::diagnostics::{estimate_aar, AarEstimate};
use mgig_core::linalg::Spd;
use mgig_core::mgig::MgigParams;

use crate::config::Config;
use crate::error::Result;
use crate::output::{cell_stream, csv_writer, num, run_cells, write_manifest, CellRecord, CELL_FAMILY};
use crate::RunReport;

pub const AAR_HEADER: [&str; 10] = [
    "series",
    "p",
    "lambda",
    "psi",
    "aar",
    "mc_se",
    "expectation",
    "expectation_se",
    "n_pairs",
    "status",
];

#[derive(Debug, Clone, PartialEq)]
pub struct AarRow {
    /// `lambda` or `psi`.
    pub series: &'static str,
    pub p: usize,
    pub lambda: f64,
    pub psi: f64,
    pub estimate: Option<AarEstimate>,
    pub status: String,
}

pub fn aar_rows(cfg: &Config) -> Result<(Vec<AarRow>, Vec<CellRecord>)> {
    let a = cfg.aar();
    let mut grid: Vec<(&'static str, f64, f64)> = a.lambda_grid.iter().map(|&l| ("lambda", l, 1.0)).collect();
    grid.extend(a.psi_grid.iter().map(|&s| ("psi", a.psi_lambda, s)));
    let records = grid
        .iter()
        .enumerate()
        .map(|(k, (series, l, s))| {
            CellRecord::new(k, format!("{series}/lambda={l}/psi={s}"), &cell_stream(cfg.seed, CELL_FAMILY, k))
        })
        .collect();
    let rows = run_cells(grid.len(), |k| {
        let (series, lambda, psi) = grid[k];
        let mut rng = cell_stream(cfg.seed, CELL_FAMILY, k);
        let est = (|| {
            let mut diag = vec![1.0; a.dim];
            diag[0] = psi;
            let params = MgigParams::new(lambda, Spd::from_diagonal(&diag)?, Spd::identity(a.dim))?;
            estimate_aar(&params, a.n_pairs, &mut rng, a.gap)
        })();
        AarRow {
            series,
            p: a.dim,
            lambda,
            psi,
            status: crate::output::status_of(&est),
            estimate: est.ok(),
        }
    });
    Ok((rows, records))
}

pub fn run_aar(cfg: &Config) -> Result<RunReport> {
    let (rows, records) = aar_rows(cfg)?;
    let path = cfg.output_dir.join("aar.csv");
    let mut w = csv_writer(&path, &AAR_HEADER)?;
    for r in &rows {
        let e = r.estimate;
        let f = |g: fn(&AarEstimate) -> f64| e.as_ref().map_or("NaN".to_string(), |e| num(g(e)));
        w.write_record([
            r.series.to_string(),
            r.p.to_string(),
            num(r.lambda),
            num(r.psi),
            f(|e| e.value),
            f(|e| e.mc_std_error),
            f(|e| e.expectation),
            f(|e| e.expectation_std_error),
            e.map_or("0".into(), |e| e.n_pairs.to_string()),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    let files = vec![path];
    let manifest = write_manifest(&cfg.output_dir, cfg, &records, &files)?;
    Ok(RunReport {
        files: [files, vec![manifest]].concat(),
        n_cells: rows.len(),
        n_failed: rows.iter().filter(|r| r.estimate.is_none()).count(),
    })
}
