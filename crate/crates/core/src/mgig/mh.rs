//! Independent Metropolis-Hastings kernels with Wishart proposals.

use rand::Rng;

use super::chain::ChainStep;
use super::params::{log_density_unnorm, MgigParams};
use crate::error::{Error, Result};
use crate::linalg::{solve_riccati, trace_product, Spd};
use crate::random::{WishartParams, WishartSampler};

/// State carried between MH steps: `Σ` with `Σ⁻¹` cached.
#[derive(Debug, Clone)]
pub struct MhState {
    pub sigma: Spd<f64>,
    pub sigma_inv: Spd<f64>,
}

impl MhState {
    pub fn new(sigma: Spd<f64>) -> Result<Self> {
        let sigma_inv = sigma.inverse()?;
        Ok(Self { sigma, sigma_inv })
    }
}

/// `ln α = −tr Γ(Σ_new⁻¹ − Σ_old⁻¹)/2` for the MH1 proposal.
pub fn mh1_log_accept(old: &Spd<f64>, new: &Spd<f64>, p: &MgigParams) -> Result<f64> {
    let old_inv = old.inverse()?;
    let new_inv = new.inverse()?;
    let g = p.gamma.as_matrix();
    Ok(-0.5 * (trace_product(g, new_inv.as_matrix()) - trace_product(g, old_inv.as_matrix())))
}

/// MH1: proposal `W_p(2λ+p+1, Ψ⁻¹)`, which matches the target up to the
/// `exp{−tr(ΓΣ⁻¹)/2}` factor.
#[derive(Debug, Clone)]
pub struct Mh1Kernel {
    proposal: WishartParams,
    sampler: WishartSampler,
    gamma: Spd<f64>,
}

impl Mh1Kernel {
    pub fn new(p: &MgigParams) -> Result<Self> {
        if p.lambda <= -1.0 {
            return Err(Error::LambdaTooSmall { lambda: p.lambda });
        }
        let dof = 2.0 * p.lambda + p.dim() as f64 + 1.0;
        let proposal = WishartParams::new(dof, p.psi.inverse()?)?;
        let sampler = proposal.sampler()?;
        Ok(Self {
            proposal,
            sampler,
            gamma: p.gamma.clone(),
        })
    }

    pub fn proposal(&self) -> &WishartParams {
        &self.proposal
    }

    pub fn step<R: Rng + ?Sized>(&self, state: &mut MhState, rng: &mut R) -> Result<ChainStep> {
        let prop = self.sampler.sample(rng);
        self.accept_or_reject(state, prop, rng)
    }

    /// Accept/reject a given proposal. Consumes one uniform.
    pub fn accept_or_reject<R: Rng + ?Sized>(&self, state: &mut MhState, prop: Spd<f64>, rng: &mut R) -> Result<ChainStep> {
        // A numerically singular proposal has tr(ΓΣ⁻¹) = ∞ and is rejected.
        let prop_inv = match prop.inverse() {
            Ok(inv) => Some(inv),
            Err(Error::NotSpd) => None,
            Err(e) => return Err(e),
        };
        let g = self.gamma.as_matrix();
        let log_alpha = match &prop_inv {
            Some(inv) => {
                (-0.5 * (trace_product(g, inv.as_matrix()) - trace_product(g, state.sigma_inv.as_matrix()))).min(0.0)
            }
            None => f64::NEG_INFINITY,
        };
        let u: f64 = rng.random();
        let accepted = u.ln() < log_alpha;
        if let (true, Some(inv)) = (accepted, prop_inv) {
            state.sigma = prop;
            state.sigma_inv = inv;
        }
        Ok(ChainStep {
            sigma: state.sigma.clone(),
            accepted,
            log_accept_prob: log_alpha,
        })
    }
}

/// MH2: proposal `W_p(ρ₀, Λ₀/ρ)` with `ρ₀ = p+1+ρ` and `Λ₀` the mode of the
/// target, so proposal and target modes coincide.
#[derive(Debug, Clone)]
pub struct Mh2Kernel {
    params: MgigParams,
    proposal: WishartParams,
    sampler: WishartSampler,
    scale_inv: Spd<f64>,
    mode: Spd<f64>,
}

impl Mh2Kernel {
    pub fn new(p: &MgigParams, rho: f64) -> Result<Self> {
        if p.lambda <= -1.0 {
            return Err(Error::LambdaTooSmall { lambda: p.lambda });
        }
        if !(rho > 0.0) {
            return Err(Error::InvalidParams(format!("MH2 rho must be positive, got {rho}")));
        }
        let mode = solve_riccati(p.lambda, &p.psi, &p.gamma)?;
        let rho0 = p.dim() as f64 + 1.0 + rho;
        let proposal = WishartParams::new(rho0, mode.scale(1.0 / rho)?)?;
        let sampler = proposal.sampler()?;
        let scale_inv = proposal.scale.inverse()?;
        Ok(Self {
            params: p.clone(),
            proposal,
            sampler,
            scale_inv,
            mode,
        })
    }

    /// The cached Riccati solution `Λ₀`.
    pub fn mode(&self) -> &Spd<f64> {
        &self.mode
    }

    pub fn proposal(&self) -> &WishartParams {
        &self.proposal
    }

    /// `ln π(Σ) − ln q(Σ)` up to a constant.
    fn log_weight(&self, s: &MhState) -> Result<f64> {
        let p = &self.params;
        let dim = p.dim() as f64;
        let ld = s.sigma.log_det()?;
        let target = p.lambda * ld
            - 0.5 * trace_product(p.psi.as_matrix(), s.sigma.as_matrix())
            - 0.5 * trace_product(p.gamma.as_matrix(), s.sigma_inv.as_matrix());
        let prop =
            0.5 * (self.proposal.dof - dim - 1.0) * ld - 0.5 * trace_product(self.scale_inv.as_matrix(), s.sigma.as_matrix());
        Ok(target - prop)
    }

    pub fn step<R: Rng + ?Sized>(&self, state: &mut MhState, rng: &mut R) -> Result<ChainStep> {
        let prop = MhState::new(self.sampler.sample(rng))?;
        self.accept_or_reject(state, prop, rng)
    }

    pub fn accept_or_reject<R: Rng + ?Sized>(&self, state: &mut MhState, prop: MhState, rng: &mut R) -> Result<ChainStep> {
        let log_alpha = (self.log_weight(&prop)? - self.log_weight(state)?).min(0.0);
        let u: f64 = rng.random();
        let accepted = u.ln() < log_alpha;
        if accepted {
            *state = prop;
        }
        Ok(ChainStep {
            sigma: state.sigma.clone(),
            accepted,
            log_accept_prob: log_alpha,
        })
    }
}

/// One MH1 step from `state`.
pub fn mh1_step<R: Rng + ?Sized>(state: &Spd<f64>, p: &MgigParams, rng: &mut R) -> Result<ChainStep> {
    let kernel = Mh1Kernel::new(p)?;
    kernel.step(&mut MhState::new(state.clone())?, rng)
}

/// One MH2 step from `state`. Solves for `Λ₀` on every call; chains reuse
/// an [`Mh2Kernel`] instead.
pub fn mh2_step<R: Rng + ?Sized>(state: &Spd<f64>, p: &MgigParams, rho: f64, rng: &mut R) -> Result<ChainStep> {
    let kernel = Mh2Kernel::new(p, rho)?;
    kernel.step(&mut MhState::new(state.clone())?, rng)
}

/// Generic independent-MH log ratio `[ln π(new) − ln π(old)] − [ln q(new) − ln q(old)]`.
pub fn independent_mh_log_ratio(old: &Spd<f64>, new: &Spd<f64>, p: &MgigParams, q: &WishartParams) -> Result<f64> {
    Ok(log_density_unnorm(new, p)? - log_density_unnorm(old, p)? - (q.ln_pdf(new)? - q.ln_pdf(old)?))
}
