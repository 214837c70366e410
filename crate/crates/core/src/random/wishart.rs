use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{trace_product, Spd};

/// `ln Γ_p(x) = p(p−1)/4 · ln π + Σ_{j=1}^p ln Γ(x + (1−j)/2)`.
pub fn ln_mvgamma(p: usize, x: f64) -> f64 {
    let pf = p as f64;
    pf * (pf - 1.0) / 4.0 * std::f64::consts::PI.ln()
        + (1..=p).map(|j| ln_gamma(x + (1.0 - j as f64) / 2.0)).sum::<f64>()
}

/// `W_p(ν, P)`: density `∝ |X|^{(ν−p−1)/2} exp{−tr(P⁻¹X)/2}`, mean `νP`.
#[derive(Debug, Clone, PartialEq)]
pub struct WishartParams {
    pub dof: f64,
    pub scale: Spd<f64>,
}

impl WishartParams {
    pub fn new(dof: f64, scale: Spd<f64>) -> Result<Self> {
        let p = scale.dim();
        if !(dof > p as f64 - 1.0) || !dof.is_finite() {
            return Err(Error::InvalidDof { dof, dim: p });
        }
        Ok(Self { dof, scale })
    }

    pub fn dim(&self) -> usize {
        self.scale.dim()
    }

    pub fn mean(&self) -> DMatrix<f64> {
        self.scale.as_matrix() * self.dof
    }

    pub fn ln_pdf(&self, x: &Spd<f64>) -> Result<f64> {
        let p = self.dim();
        if x.dim() != p {
            return Err(Error::DimMismatch { expected: p, found: x.dim() });
        }
        let pf = p as f64;
        let nu = self.dof;
        let inv = self.scale.inverse()?;
        Ok(0.5 * (nu - pf - 1.0) * x.log_det()?
            - 0.5 * trace_product(inv.as_matrix(), x.as_matrix())
            - 0.5 * nu * pf * std::f64::consts::LN_2
            - 0.5 * nu * self.scale.log_det()?
            - ln_mvgamma(p, 0.5 * nu))
    }

    /// Sampler with the scale factorization done once.
    pub fn sampler(&self) -> Result<WishartSampler> {
        WishartSampler::new(self)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Spd<f64>> {
        Ok(self.sampler()?.sample(rng))
    }
}

/// Bartlett construction `X = (L T)(L T)ᵀ` with `P = L Lᵀ`, `T` lower
/// triangular, `T_ii² ∼ χ²(ν − i + 1)` and `T_ij ∼ N(0, 1)` below the diagonal.
#[derive(Debug, Clone)]
pub struct WishartSampler {
    dof: f64,
    l: DMatrix<f64>,
    chi: Vec<ChiSquared<f64>>,
}

impl WishartSampler {
    pub fn new(params: &WishartParams) -> Result<Self> {
        let p = params.dim();
        let l = params.scale.cholesky()?.l();
        let chi = (0..p)
            .map(|i| ChiSquared::new(params.dof - i as f64).map_err(|_| Error::InvalidDof { dof: params.dof, dim: p }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dof: params.dof, l, chi })
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Spd<f64> {
        let p = self.l.nrows();
        let mut t = DMatrix::zeros(p, p);
        for i in 0..p {
            t[(i, i)] = self.chi[i].sample(rng).sqrt();
            for j in 0..i {
                t[(i, j)] = rng.sample::<f64, _>(StandardNormal);
            }
        }
        let lt = &self.l * t;
        Spd::new_unchecked(&lt * lt.transpose())
    }
}

/// `IW_p(Ψ, ν)`: `X⁻¹ ∼ W_p(ν, Ψ⁻¹)`, density `∝ |X|^{−(ν+p+1)/2} exp{−tr(ΨX⁻¹)/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseWishartParams {
    pub dof: f64,
    pub scale: Spd<f64>,
}

impl InverseWishartParams {
    pub fn new(dof: f64, scale: Spd<f64>) -> Result<Self> {
        WishartParams::new(dof, scale.clone())?;
        Ok(Self { dof, scale })
    }

    pub fn ln_pdf(&self, x: &Spd<f64>) -> Result<f64> {
        let p = self.scale.dim();
        let pf = p as f64;
        let nu = self.dof;
        let xinv = x.inverse()?;
        Ok(0.5 * nu * self.scale.log_det()?
            - 0.5 * nu * pf * std::f64::consts::LN_2
            - ln_mvgamma(p, 0.5 * nu)
            - 0.5 * (nu + pf + 1.0) * x.log_det()?
            - 0.5 * trace_product(self.scale.as_matrix(), xinv.as_matrix()))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Spd<f64>> {
        let w = WishartParams::new(self.dof, self.scale.inverse()?)?.sample(rng)?;
        w.inverse()
    }
}
