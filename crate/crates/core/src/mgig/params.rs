use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{trace_product, Spd, Tolerances};

/// `MGIG_p(λ, Ψ, Γ)`: density `∝ |Σ|^λ exp{−tr(ΨΣ + ΓΣ⁻¹)/2}` on SPD matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MgigParams {
    pub lambda: f64,
    pub psi: Spd<f64>,
    pub gamma: Spd<f64>,
}

impl MgigParams {
    pub fn new(lambda: f64, psi: Spd<f64>, gamma: Spd<f64>) -> Result<Self> {
        if psi.dim() != gamma.dim() {
            return Err(Error::DimMismatch {
                expected: psi.dim(),
                found: gamma.dim(),
            });
        }
        if !lambda.is_finite() {
            return Err(Error::InvalidParams(format!("order must be finite, got {lambda}")));
        }
        Ok(Self { lambda, psi, gamma })
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    /// Law of `Σ⁻¹`: `MGIG_p(−λ−(p+1), Γ, Ψ)`.
    pub fn inverted(&self) -> Self {
        Self {
            lambda: -self.lambda - (self.dim() as f64 + 1.0),
            psi: self.gamma.clone(),
            gamma: self.psi.clone(),
        }
    }

    /// Law of `C Σ Cᵀ`: `MGIG_p(λ, C⁻ᵀΨC⁻¹, CΓCᵀ)`.
    pub fn congruence(&self, c: &DMatrix<f64>) -> Result<Self> {
        let c_inv = c
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParams("congruence matrix is singular".into()))?;
        Ok(Self {
            lambda: self.lambda,
            psi: self.psi.congruence(&c_inv.transpose())?,
            gamma: self.gamma.congruence(c)?,
        })
    }

    /// Applies the inversion map when `λ ≤ −(p+1)/2`, so the returned order
    /// exceeds `−(p+1)/2`. The flag tells whether draws must be inverted.
    pub fn canonicalize(&self) -> (Self, bool) {
        if self.lambda <= -(self.dim() as f64 + 1.0) / 2.0 {
            (self.inverted(), true)
        } else {
            (self.clone(), false)
        }
    }
}

/// Unnormalized log-density `λ log|Σ| − tr(ΨΣ + ΓΣ⁻¹)/2`.
pub fn log_density_unnorm(sigma: &Spd<f64>, p: &MgigParams) -> Result<f64> {
    if sigma.dim() != p.dim() {
        return Err(Error::DimMismatch {
            expected: p.dim(),
            found: sigma.dim(),
        });
    }
    let inv = sigma.inverse()?;
    Ok(p.lambda * sigma.log_det()?
        - 0.5 * trace_product(p.psi.as_matrix(), sigma.as_matrix())
        - 0.5 * trace_product(p.gamma.as_matrix(), inv.as_matrix()))
}

/// `MGIG_p(λ, Ψ, ΘΘᵀ)` with `Θ` of full column rank `q < p`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateMgigParams {
    pub lambda: f64,
    pub psi: Spd<f64>,
    pub theta: DMatrix<f64>,
}

impl DegenerateMgigParams {
    pub fn new(lambda: f64, psi: Spd<f64>, theta: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerances(lambda, psi, theta, &Tolerances::default())
    }

    pub fn with_tolerances(lambda: f64, psi: Spd<f64>, theta: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        let p = psi.dim();
        if theta.nrows() != p {
            return Err(Error::DimMismatch {
                expected: p,
                found: theta.nrows(),
            });
        }
        if theta.ncols() >= p {
            return Err(Error::InvalidParams(format!(
                "theta must have fewer than {p} columns, got {}",
                theta.ncols()
            )));
        }
        if lambda <= -1.0 {
            return Err(Error::LambdaTooSmall { lambda });
        }
        if theta.ncols() > 0 {
            let sv = theta.clone().singular_values();
            let largest = sv.max();
            let smallest = sv.min();
            if !(largest > 0.0) || smallest <= tol.rank * largest {
                let ratio = if largest > 0.0 { smallest / largest } else { 0.0 };
                return Err(Error::RankDeficientTheta { ratio });
            }
        }
        Ok(Self { lambda, psi, theta })
    }

    pub fn dim(&self) -> usize {
        self.psi.dim()
    }

    pub fn rank(&self) -> usize {
        self.theta.ncols()
    }

    pub fn gamma(&self) -> DMatrix<f64> {
        &self.theta * self.theta.transpose()
    }
}

/// The MGIG transition kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplerKind {
    Gs,
    Mh1,
    Mh2 { rho: f64 },
    Hr,
}

impl SamplerKind {
    pub const DEFAULT_RHO: f64 = 5.0;

    pub fn name(&self) -> &'static str {
        match self {
            SamplerKind::Gs => "GS",
            SamplerKind::Mh1 => "MH1",
            SamplerKind::Mh2 { .. } => "MH2",
            SamplerKind::Hr => "HR",
        }
    }

    /// Checks the order requirement of the Wishart-proposal kernels.
    pub fn check(&self, lambda: f64) -> Result<()> {
        match self {
            SamplerKind::Mh1 | SamplerKind::Mh2 { .. } if lambda <= -1.0 => Err(Error::LambdaTooSmall { lambda }),
            SamplerKind::Mh2 { rho } if !(*rho > 0.0) => {
                Err(Error::InvalidParams(format!("MH2 rho must be positive, got {rho}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GS" => Ok(SamplerKind::Gs),
            "MH1" | "MH" => Ok(SamplerKind::Mh1),
            "MH2" => Ok(SamplerKind::Mh2 {
                rho: SamplerKind::DEFAULT_RHO,
            }),
            "HR" => Ok(SamplerKind::Hr),
            other => Err(Error::InvalidParams(format!("unknown sampler '{other}'"))),
        }
    }
}
