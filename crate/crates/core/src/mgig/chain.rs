use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;

use super::gibbs::gibbs_step_in_place;
use super::hit_and_run::{HrKernel, HrState};
use super::mh::{Mh1Kernel, Mh2Kernel, MhState};
use super::params::{MgigParams, SamplerKind};
use crate::error::{Error, Result};
use crate::linalg::{solve_riccati, Spd, UnitCholesky};

/// One recorded transition.
#[derive(Debug, Clone)]
pub struct ChainStep {
    pub sigma: Spd<f64>,
    /// Always true for GS.
    pub accepted: bool,
    /// `ln min(1, r)`; zero for GS.
    pub log_accept_prob: f64,
}

#[derive(Debug, Clone)]
pub struct Chain {
    pub steps: Vec<ChainStep>,
    pub params: MgigParams,
    pub kind: SamplerKind,
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Accepted moves over all post-burn-in iterations, recorded or not.
    pub n_accepted: usize,
    /// Wall-clock time of the post-burn-in iterations.
    pub wall_seconds: f64,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.params.dim()
    }

    pub fn sigmas(&self) -> impl Iterator<Item = &Spd<f64>> {
        self.steps.iter().map(|s| &s.sigma)
    }

    pub fn acceptance_rate(&self) -> f64 {
        let n = self.n_iter - self.burn_in;
        if n == 0 {
            return f64::NAN;
        }
        self.n_accepted as f64 / n as f64
    }

    /// Series of entry `(i, j)` over the recorded draws.
    pub fn entry_series(&self, i: usize, j: usize) -> Vec<f64> {
        self.steps.iter().map(|s| s.sigma[(i, j)]).collect()
    }

    pub fn mean(&self) -> Result<DMatrix<f64>> {
        if self.is_empty() {
            return Err(Error::EmptyChain);
        }
        let p = self.dim();
        let sum = self.sigmas().fold(DMatrix::zeros(p, p), |acc, s| acc + s.as_matrix());
        Ok(sum / self.len() as f64)
    }
}

/// Riccati mode when `λ > −1`, identity otherwise.
pub fn default_init(p: &MgigParams) -> Spd<f64> {
    if p.lambda > -1.0 {
        if let Ok(mode) = solve_riccati(p.lambda, &p.psi, &p.gamma) {
            return mode;
        }
    }
    Spd::identity(p.dim())
}

/// A kernel together with its native state.
#[derive(Debug, Clone)]
pub enum Sampler {
    Gs { params: MgigParams, state: UnitCholesky<f64> },
    Mh1 { kernel: Mh1Kernel, state: MhState },
    Mh2 { kernel: Mh2Kernel, state: MhState },
    Hr { kernel: HrKernel, state: HrState },
}

impl Sampler {
    pub fn new(params: &MgigParams, kind: SamplerKind, init: Spd<f64>) -> Result<Self> {
        if init.dim() != params.dim() {
            return Err(Error::DimMismatch {
                expected: params.dim(),
                found: init.dim(),
            });
        }
        kind.check(params.lambda)?;
        Ok(match kind {
            SamplerKind::Gs => Sampler::Gs {
                params: params.clone(),
                state: UnitCholesky::from_spd(&init)?,
            },
            SamplerKind::Mh1 => Sampler::Mh1 {
                kernel: Mh1Kernel::new(params)?,
                state: MhState::new(init)?,
            },
            SamplerKind::Mh2 { rho } => Sampler::Mh2 {
                kernel: Mh2Kernel::new(params, rho)?,
                state: MhState::new(init)?,
            },
            SamplerKind::Hr => {
                let kernel = HrKernel::new(params);
                let state = kernel.init(init);
                Sampler::Hr { kernel, state }
            }
        })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<ChainStep> {
        match self {
            Sampler::Gs { params, state } => {
                gibbs_step_in_place(state, params, rng)?;
                Ok(ChainStep {
                    sigma: state.reconstruct()?,
                    accepted: true,
                    log_accept_prob: 0.0,
                })
            }
            Sampler::Mh1 { kernel, state } => kernel.step(state, rng),
            Sampler::Mh2 { kernel, state } => kernel.step(state, rng),
            Sampler::Hr { kernel, state } => kernel.step(state, rng),
        }
    }

    pub fn current(&self) -> Result<Spd<f64>> {
        match self {
            Sampler::Gs { state, .. } => state.reconstruct(),
            Sampler::Mh1 { state, .. } | Sampler::Mh2 { state, .. } => Ok(state.sigma.clone()),
            Sampler::Hr { state, .. } => Ok(state.sigma.clone()),
        }
    }
}

/// Runs `n_iter` transitions and keeps iterations `t ≥ burn_in` with
/// `(t − burn_in) % thin == 0`.
pub fn sample_chain<R: Rng + ?Sized>(
    params: &MgigParams,
    kind: SamplerKind,
    n_iter: usize,
    burn_in: usize,
    thin: usize,
    rng: &mut R,
    init: Option<Spd<f64>>,
) -> Result<Chain> {
    if n_iter <= burn_in {
        return Err(Error::InvalidParams(format!(
            "n_iter ({n_iter}) must exceed burn_in ({burn_in})"
        )));
    }
    if thin == 0 {
        return Err(Error::InvalidParams("thin must be at least 1".into()));
    }
    let init = init.unwrap_or_else(|| default_init(params));
    let mut sampler = Sampler::new(params, kind, init)?;
    for _ in 0..burn_in {
        sampler.step(rng)?;
    }
    let kept = n_iter - burn_in;
    let mut steps = Vec::with_capacity(kept.div_ceil(thin));
    let mut n_accepted = 0;
    let start = Instant::now();
    for t in 0..kept {
        let step = sampler.step(rng)?;
        n_accepted += step.accepted as usize;
        if t % thin == 0 {
            steps.push(step);
        }
    }
    let wall_seconds = start.elapsed().as_secs_f64();
    Ok(Chain {
        steps,
        params: params.clone(),
        kind,
        n_iter,
        burn_in,
        thin,
        n_accepted,
        wall_seconds,
    })
}
