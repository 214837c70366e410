use nalgebra::DMatrix;

use super::ess::{ess, MIN_SERIES_LEN};
use crate::error::{Error, Result};
use crate::linalg::Sym;
use crate::mgig::Chain;

/// Entrywise posterior summaries of `Σ` and `Σ⁻¹`.
#[derive(Debug, Clone)]
pub struct ChainSummary {
    pub mean: Sym<f64>,
    pub mean_inverse: Sym<f64>,
    /// `sd/√ESS` per entry. NaN for a single draw.
    pub std_errors: Sym<f64>,
    pub inverse_std_errors: Sym<f64>,
}

/// Mean and Monte Carlo standard error `sd/√ESS` of a scalar series. Series
/// shorter than the ESS minimum fall back to `√n`.
pub fn mean_and_se(series: &[f64]) -> (f64, f64) {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let n_eff = if n >= MIN_SERIES_LEN {
        ess(series).map(|e| e.value).unwrap_or(n as f64)
    } else {
        n as f64
    };
    (mean, (var / n_eff).sqrt())
}

fn summarize(draws: &[DMatrix<f64>], p: usize) -> (Sym<f64>, Sym<f64>) {
    let mut mean = DMatrix::zeros(p, p);
    let mut se = DMatrix::zeros(p, p);
    let mut series = vec![0.0; draws.len()];
    for i in 0..p {
        for j in i..p {
            for (t, d) in draws.iter().enumerate() {
                series[t] = d[(i, j)];
            }
            let (m, s) = mean_and_se(&series);
            mean[(i, j)] = m;
            mean[(j, i)] = m;
            se[(i, j)] = s;
            se[(j, i)] = s;
        }
    }
    (Sym::new_unchecked(mean), Sym::new_unchecked(se))
}

pub fn chain_summary(chain: &Chain) -> Result<ChainSummary> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    let p = chain.dim();
    let draws: Vec<DMatrix<f64>> = chain.sigmas().map(|s| s.as_matrix().clone()).collect();
    let inverses = chain
        .sigmas()
        .map(|s| s.inverse().map(|m| m.into_inner()))
        .collect::<Result<Vec<_>>>()?;
    let (mean, std_errors) = summarize(&draws, p);
    let (mean_inverse, inverse_std_errors) = summarize(&inverses, p);
    Ok(ChainSummary {
        mean,
        mean_inverse,
        std_errors,
        inverse_std_errors,
    })
}
