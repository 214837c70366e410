use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::Spd;

/// `N(N⁻¹ n, N⁻¹)`, parameterized by the precision `N` and `n = N · mean`.
#[derive(Debug, Clone, PartialEq)]
pub struct MvnPrecisionParams {
    pub precision_times_mean: DVector<f64>,
    pub precision: Spd<f64>,
}

impl MvnPrecisionParams {
    pub fn new(precision_times_mean: DVector<f64>, precision: Spd<f64>) -> Result<Self> {
        if precision_times_mean.len() != precision.dim() {
            return Err(Error::DimMismatch {
                expected: precision.dim(),
                found: precision_times_mean.len(),
            });
        }
        Ok(Self {
            precision_times_mean,
            precision,
        })
    }

    pub fn dim(&self) -> usize {
        self.precision.dim()
    }

    pub fn mean(&self) -> Result<DVector<f64>> {
        Ok(self.precision.cholesky()?.solve(&self.precision_times_mean))
    }

    pub fn covariance(&self) -> Result<DMatrix<f64>> {
        Ok(self.precision.inverse()?.into_inner())
    }

    /// Normalized log-density.
    pub fn ln_pdf(&self, x: &DVector<f64>) -> Result<f64> {
        let chol = self.precision.cholesky()?;
        let mean = chol.solve(&self.precision_times_mean);
        let d = x - mean;
        let quad = d.dot(&(self.precision.as_matrix() * &d));
        let l = chol.l_dirty();
        let half_ln_det: f64 = (0..self.dim()).map(|i| l[(i, i)].ln()).sum();
        let k = self.dim() as f64;
        Ok(-0.5 * k * (2.0 * std::f64::consts::PI).ln() + half_ln_det - 0.5 * quad)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DVector<f64>> {
        sample_mvn_precision(self, rng)
    }
}

/// Draws `N⁻¹ n + L⁻ᵀ z` with `N = L Lᵀ` and `z` standard normal.
pub fn sample_mvn_precision<R: Rng + ?Sized>(p: &MvnPrecisionParams, rng: &mut R) -> Result<DVector<f64>> {
    let chol = p.precision.cholesky()?;
    let mean = chol.solve(&p.precision_times_mean);
    let z = DVector::from_fn(p.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let l = chol.l();
    let dev = l
        .transpose()
        .solve_upper_triangular(&z)
        .ok_or(Error::NotSpd)?;
    Ok(mean + dev)
}

/// Standard normal matrix of the given shape.
pub fn standard_normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}
