//! Effective sample size by Geyer's initial monotone positive sequence.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::mgig::Chain;

pub const MIN_SERIES_LEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ess {
    pub value: f64,
    /// Constant series; `value` is then `n`.
    pub degenerate: bool,
}

/// Sample autocorrelations `ρ̂_0 … ρ̂_{n−1}` (biased autocovariance over
/// `n`). `None` for a constant series.
pub fn autocorrelation(series: &[f64]) -> Option<Vec<f64>> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let len = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .map(|x| Complex::new(x - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex::new(z.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let c0 = buf[0].re;
    let scale = series.iter().map(|x| x.abs()).fold(0.0, f64::max);
    // Variance indistinguishable from rounding of the centring step.
    if !(c0 > (n as f64) * len as f64 * (1e-14 * scale).powi(2)) {
        return None;
    }
    Some(buf[..n].iter().map(|z| z.re / c0).collect())
}

pub fn ess(series: &[f64]) -> Result<Ess> {
    let n = series.len();
    if n < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort {
            len: n,
            min: MIN_SERIES_LEN,
        });
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("series contains non-finite values".into()));
    }
    let Some(rho) = autocorrelation(series) else {
        return Ok(Ess {
            value: n as f64,
            degenerate: true,
        });
    };
    // τ = −1 + 2 Σ_m Γ_m with Γ_m = ρ̂_{2m} + ρ̂_{2m+1}, truncated at the
    // first non-positive pair and forced non-increasing.
    let mut tau = -1.0;
    let mut prev = f64::INFINITY;
    let mut m = 0;
    while 2 * m + 1 < n {
        let g = rho[2 * m] + rho[2 * m + 1];
        if g <= 0.0 {
            break;
        }
        let g = g.min(prev);
        tau += 2.0 * g;
        prev = g;
        m += 1;
    }
    let value = if tau > 0.0 { (n as f64 / tau).min(n as f64) } else { n as f64 };
    Ok(Ess {
        value,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EssReport {
    /// One entry per `(i, j)` with `i ≤ j`, row by row.
    pub per_entry: Vec<f64>,
    pub degenerate: Vec<bool>,
    pub mean_ess: f64,
    pub ess_per_second: f64,
    pub wall_seconds: f64,
    pub n_samples: usize,
}

pub fn ess_matrix_chain(chain: &Chain) -> Result<EssReport> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    let p = chain.dim();
    let mut per_entry = Vec::with_capacity(p * (p + 1) / 2);
    let mut degenerate = Vec::with_capacity(p * (p + 1) / 2);
    for i in 0..p {
        for j in i..p {
            let e = ess(&chain.entry_series(i, j))?;
            per_entry.push(e.value);
            degenerate.push(e.degenerate);
        }
    }
    let mean_ess = per_entry.iter().sum::<f64>() / per_entry.len() as f64;
    let wall_seconds = chain.wall_seconds;
    let ess_per_second = if wall_seconds > 0.0 { mean_ess / wall_seconds } else { f64::INFINITY };
    Ok(EssReport {
        per_entry,
        degenerate,
        mean_ess,
        ess_per_second,
        wall_seconds,
        n_samples: chain.len(),
    })
}
