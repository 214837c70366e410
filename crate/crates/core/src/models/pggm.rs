//! Sparse partial Gaussian graphical model
//!
//! ```text
//! y_i | Δ, Ω ∼ N_q(Ω⁻¹Δx_i, Ω⁻¹),             i = 1..n
//! Δ_k | Ω, λ_k, π ∼ (1−π) N_q(0, λ_kΩ) + π δ₀,  k = 1..p
//! λ_k ∼ Ga(α, ℓ_k),  Ω ∼ W_q(u, V),  π ∼ Be(a, b)
//! ```
//!
//! The full conditional of `Ω` is `MGIG_q((n+N₀+u−p−q−1)/2, YᵀY+V⁻¹, Δ(XᵀX+diag(1/λ))Δᵀ)`
//! with `N₀` the number of zero columns of `Δ`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{psd_factor, psd_rank, solve_riccati, trace_product, Spd, UnitCholesky};
use crate::mgig::{
    gibbs_step_in_place, DegenerateMgigParams, HrKernel, MatsumotoYorSampler, Mh1Kernel, MgigParams, MhState,
    SamplerKind,
};
use crate::random::{sample_gig, standard_normal_matrix, GigParams, WishartParams};

const RANK_TOL: f64 = 1e-10;
const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct PggmData {
    pub y: DMatrix<f64>,
    pub x: DMatrix<f64>,
    yty: DMatrix<f64>,
    xtx: DMatrix<f64>,
    ytx: DMatrix<f64>,
}

impl PggmData {
    pub fn new(y: DMatrix<f64>, x: DMatrix<f64>) -> Result<Self> {
        if y.nrows() == 0 {
            return Err(Error::InvalidParams("need at least one observation".into()));
        }
        if x.nrows() != y.nrows() {
            return Err(Error::DimMismatch {
                expected: y.nrows(),
                found: x.nrows(),
            });
        }
        let yty = y.transpose() * &y;
        let xtx = x.transpose() * &x;
        let ytx = y.transpose() * &x;
        Ok(Self { y, x, yty, xtx, ytx })
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    /// Response dimension.
    pub fn q(&self) -> usize {
        self.y.ncols()
    }

    /// Number of covariates.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

#[derive(Debug, Clone)]
pub struct PggmState {
    pub omega: Spd<f64>,
    /// `q × p`; spike draws write exact zeros.
    pub delta: DMatrix<f64>,
    pub lambda: Vec<f64>,
    pub pi: f64,
}

impl PggmState {
    /// `Ω = I`, `Δ = 0`, `λ_k = 1`, `π = 1/2`.
    pub fn initial(q: usize, p: usize) -> Self {
        Self {
            omega: Spd::identity(q),
            delta: DMatrix::zeros(q, p),
            lambda: vec![1.0; p],
            pi: 0.5,
        }
    }

    pub fn n_zero(&self) -> usize {
        self.delta.column_iter().filter(|c| c.iter().all(|v| *v == 0.0)).count()
    }
}

#[derive(Debug, Clone)]
pub struct PggmHyper {
    pub u: f64,
    pub v: Spd<f64>,
    pub alpha: f64,
    pub ell: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl PggmHyper {
    /// `α = (q+1)/2`, `ℓ_k = 1`, `u = q`, `V = I/q`, `a = b = 1`.
    pub fn standard(q: usize, p: usize) -> Self {
        let qf = q as f64;
        Self {
            u: qf,
            v: Spd::from_diagonal(&vec![1.0 / qf; q]).expect("positive diagonal"),
            alpha: (qf + 1.0) / 2.0,
            ell: vec![1.0; p],
            a: 1.0,
            b: 1.0,
        }
    }

    pub fn validate(&self, q: usize, p: usize) -> Result<()> {
        if self.v.dim() != q {
            return Err(Error::DimMismatch {
                expected: q,
                found: self.v.dim(),
            });
        }
        if self.ell.len() != p {
            return Err(Error::DimMismatch {
                expected: p,
                found: self.ell.len(),
            });
        }
        if !(self.u > q as f64 - 1.0) {
            return Err(Error::InvalidDof { dof: self.u, dim: q });
        }
        if !(self.alpha > 0.0 && self.a > 0.0 && self.b > 0.0) || self.ell.iter().any(|l| !(*l > 0.0)) {
            return Err(Error::InvalidParams("PGGM hyperparameters must be positive".into()));
        }
        Ok(())
    }
}

/// Parameters of the `Ω` full conditional.
#[derive(Debug, Clone)]
pub struct OmegaConditional {
    pub lambda: f64,
    pub psi: Spd<f64>,
    /// `Δ(XᵀX + diag(1/λ))Δᵀ`, possibly singular.
    pub gamma: DMatrix<f64>,
    pub gamma_rank: usize,
    /// Usable MGIG parameters: `Γ` itself when nonsingular, else `Γ + εI`.
    pub params: MgigParams,
    /// Matsumoto-Yor route when `Γ` is singular and the order exceeds −1.
    pub degenerate: Option<DegenerateMgigParams>,
}

impl OmegaConditional {
    pub fn is_degenerate(&self) -> bool {
        self.gamma_rank < self.psi.dim()
    }
}

pub fn pggm_omega_conditional(state: &PggmState, data: &PggmData, hyper: &PggmHyper) -> Result<OmegaConditional> {
    let (q, p) = (data.q(), data.p());
    if state.delta.nrows() != q || state.delta.ncols() != p {
        return Err(Error::DimMismatch {
            expected: q * p,
            found: state.delta.len(),
        });
    }
    let n0 = state.n_zero() as f64;
    let lambda = (data.n() as f64 + n0 + hyper.u - p as f64 - q as f64 - 1.0) / 2.0;
    let psi = Spd::new_unchecked(&data.yty + hyper.v.inverse()?.as_matrix());
    let mut inner = data.xtx.clone();
    for (k, lk) in state.lambda.iter().enumerate() {
        inner[(k, k)] += 1.0 / lk;
    }
    let gamma = &state.delta * inner * state.delta.transpose();
    let gamma = (&gamma + gamma.transpose()) * 0.5;
    let gamma_rank = psd_rank(&gamma, RANK_TOL);

    let full = if gamma_rank == q { Spd::new(gamma.clone()).ok() } else { None };
    let (params, degenerate, gamma_rank) = match full {
        Some(g) => (MgigParams::new(lambda, psi.clone(), g)?, None, q),
        None => {
            let rank = gamma_rank.min(q - 1);
            let degenerate = if lambda > -1.0 {
                psd_factor(&gamma, RANK_TOL)
                    .and_then(|theta| DegenerateMgigParams::new(lambda, psi.clone(), theta))
                    .ok()
            } else {
                None
            };
            let eps = RIDGE * psi.as_matrix().trace() / q as f64;
            if degenerate.is_none() {
                log::warn!("singular PGGM scale at order {lambda}; adding {eps:e} I");
            }
            let ridge = Spd::new_unchecked(&gamma + DMatrix::identity(q, q) * eps);
            (MgigParams::new(lambda, psi.clone(), ridge)?, degenerate, rank)
        }
    };
    Ok(OmegaConditional {
        lambda,
        psi,
        gamma,
        gamma_rank,
        params,
        degenerate,
    })
}

/// Joint log-density of `(Ω, Δ, λ, π)` and the data, up to a constant. Each
/// `Δ_k` term is against the spike-plus-Lebesgue base measure, so zero and
/// nonzero columns are comparable.
pub fn pggm_log_joint(state: &PggmState, data: &PggmData, hyper: &PggmHyper) -> Result<f64> {
    let (q, p, n) = (data.q(), data.p(), data.n() as f64);
    let qf = q as f64;
    let omega = state.omega.as_matrix();
    let omega_inv = state.omega.inverse()?;
    let ld = state.omega.log_det()?;
    let delta = &state.delta;
    let mut out = 0.5 * n * ld - 0.5 * trace_product(omega, &data.yty) + (delta.transpose() * &data.ytx).trace()
        - 0.5 * trace_product(omega_inv.as_matrix(), &(delta * &data.xtx * delta.transpose()));
    for k in 0..p {
        let lk = state.lambda[k];
        let col = delta.column(k);
        if col.iter().all(|v| *v == 0.0) {
            out += state.pi.ln();
        } else {
            let quad = col.dot(&(omega_inv.as_matrix() * col));
            out += (1.0 - state.pi).ln() - 0.5 * qf * (2.0 * std::f64::consts::PI * lk).ln() - 0.5 * ld
                - 0.5 * quad / lk;
        }
        out += (hyper.alpha - 1.0) * lk.ln() - hyper.ell[k] * lk;
    }
    out += 0.5 * (hyper.u - qf - 1.0) * ld - 0.5 * trace_product(hyper.v.inverse()?.as_matrix(), omega);
    out += (hyper.a - 1.0) * state.pi.ln() + (hyper.b - 1.0) * (1.0 - state.pi).ln();
    Ok(out)
}

/// Scheme for the `Ω` block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OmegaUpdate {
    /// `scans` Gibbs scans from the current `Ω`.
    Gs { scans: usize },
    Mh1,
    Hr,
    /// Plug in the conditional mode.
    Mi,
}

impl OmegaUpdate {
    pub fn name(&self) -> &'static str {
        match self {
            OmegaUpdate::Gs { .. } => "GS",
            OmegaUpdate::Mh1 => "MH1",
            OmegaUpdate::Hr => "HR",
            OmegaUpdate::Mi => "MI",
        }
    }
}

/// Slab probability pieces for column `k`: `(log BF, h, s)` where
/// `h = c_k − Ω⁻¹r_k` and `s = (XᵀX)_kk + 1/λ_k`.
fn column_terms(k: usize, state: &PggmState, data: &PggmData, omega_inv: &DMatrix<f64>) -> (f64, DVector<f64>, f64) {
    let q = data.q() as f64;
    let skk = data.xtx[(k, k)];
    let mut r = &state.delta * data.xtx.column(k);
    r.axpy(-skk, &state.delta.column(k), 1.0);
    let h = data.ytx.column(k) - omega_inv * r;
    let lk = state.lambda[k];
    let s = skk + 1.0 / lk;
    let quad = h.dot(&(state.omega.as_matrix() * &h));
    let log_bf = -0.5 * q * (lk * skk).ln_1p() + 0.5 * quad / s;
    (log_bf, h, s)
}

/// Posterior probability that `Δ_k = 0` given everything else.
pub fn spike_probability(k: usize, state: &PggmState, data: &PggmData) -> Result<f64> {
    let omega_inv = state.omega.inverse()?;
    let (log_bf, _, _) = column_terms(k, state, data, omega_inv.as_matrix());
    Ok(spike_prob(state.pi, log_bf))
}

fn spike_prob(pi: f64, log_bf: f64) -> f64 {
    // π / (π + (1−π) BF)
    let z = (1.0 - pi).ln() - pi.ln() + log_bf;
    1.0 / (1.0 + z.exp())
}

pub fn pggm_gibbs_step<R: Rng + ?Sized>(
    state: &mut PggmState,
    data: &PggmData,
    hyper: &PggmHyper,
    update: OmegaUpdate,
    rng: &mut R,
) -> Result<()> {
    let (q, p) = (data.q(), data.p());
    let qf = q as f64;
    let omega_inv = state.omega.inverse()?;
    let omega_chol = state.omega.cholesky()?.l();

    for k in 0..p {
        let (log_bf, h, s) = column_terms(k, state, data, omega_inv.as_matrix());
        let u: f64 = rng.random();
        if u < spike_prob(state.pi, log_bf) {
            state.delta.column_mut(k).fill(0.0);
        } else {
            let z = DVector::from_fn(q, |_, _| rng.sample::<f64, _>(StandardNormal));
            // N(Ωh/s, Ω/s)
            let draw = (state.omega.as_matrix() * h) / s + (&omega_chol * z) / s.sqrt();
            state.delta.set_column(k, &draw);
        }
        let col = state.delta.column(k);
        let g = if col.iter().all(|v| *v == 0.0) {
            GigParams::new(hyper.alpha, 2.0 * hyper.ell[k], 0.0)?
        } else {
            let d = col.dot(&(omega_inv.as_matrix() * col));
            GigParams::new(hyper.alpha - 0.5 * qf, 2.0 * hyper.ell[k], d)?
        };
        state.lambda[k] = sample_gig(&g, rng);
    }

    let n0 = state.n_zero() as f64;
    let beta = Beta::new(hyper.a + n0, hyper.b + p as f64 - n0)
        .map_err(|e| Error::InvalidParams(format!("beta parameters: {e}")))?;
    state.pi = beta.sample(rng);

    let cond = pggm_omega_conditional(state, data, hyper)?;
    state.omega = update_omega(&state.omega, &cond, update, rng)?;
    Ok(())
}

fn update_omega<R: Rng + ?Sized>(
    current: &Spd<f64>,
    cond: &OmegaConditional,
    update: OmegaUpdate,
    rng: &mut R,
) -> Result<Spd<f64>> {
    if update == OmegaUpdate::Mi {
        return solve_riccati(cond.params.lambda, &cond.params.psi, &cond.params.gamma);
    }
    if let Some(deg) = &cond.degenerate {
        let (kind, iters) = match update {
            OmegaUpdate::Gs { scans } => (SamplerKind::Gs, scans.max(1)),
            OmegaUpdate::Mh1 => (SamplerKind::Mh1, 1),
            _ => (SamplerKind::Hr, 1),
        };
        return MatsumotoYorSampler::new(deg, kind, iters)?.sample(rng);
    }
    let params = &cond.params;
    match update {
        OmegaUpdate::Gs { scans } => {
            let mut f = UnitCholesky::from_spd(current)?;
            for _ in 0..scans.max(1) {
                gibbs_step_in_place(&mut f, params, rng)?;
            }
            f.reconstruct()
        }
        OmegaUpdate::Mh1 => {
            let mut st = MhState::new(current.clone())?;
            Mh1Kernel::new(params)?.step(&mut st, rng)?;
            Ok(st.sigma)
        }
        OmegaUpdate::Hr => {
            let k = HrKernel::new(params);
            let mut st = k.init(current.clone());
            k.step(&mut st, rng)?;
            Ok(st.sigma)
        }
        OmegaUpdate::Mi => unreachable!(),
    }
}

#[derive(Debug, Clone)]
pub struct PggmChain {
    /// Post-burn-in states.
    pub states: Vec<PggmState>,
    pub wall_seconds: f64,
}

impl PggmChain {
    pub fn omega_mean(&self) -> DMatrix<f64> {
        let q = self.states[0].omega.dim();
        let sum = self
            .states
            .iter()
            .fold(DMatrix::zeros(q, q), |acc, s| acc + s.omega.as_matrix());
        sum / self.states.len() as f64
    }

    pub fn delta_mean(&self) -> DMatrix<f64> {
        let d = &self.states[0].delta;
        let sum = self
            .states
            .iter()
            .fold(DMatrix::zeros(d.nrows(), d.ncols()), |acc, s| acc + &s.delta);
        sum / self.states.len() as f64
    }
}

pub fn run_pggm<R: Rng + ?Sized>(
    data: &PggmData,
    hyper: &PggmHyper,
    update: OmegaUpdate,
    n_iter: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<PggmChain> {
    if n_iter <= burn_in {
        return Err(Error::InvalidParams(format!(
            "n_iter ({n_iter}) must exceed burn_in ({burn_in})"
        )));
    }
    hyper.validate(data.q(), data.p())?;
    let mut state = PggmState::initial(data.q(), data.p());
    for _ in 0..burn_in {
        pggm_gibbs_step(&mut state, data, hyper, update, rng)?;
    }
    let mut states = Vec::with_capacity(n_iter - burn_in);
    let start = Instant::now();
    for _ in burn_in..n_iter {
        pggm_gibbs_step(&mut state, data, hyper, update, rng)?;
        states.push(state.clone());
    }
    Ok(PggmChain {
        states,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone)]
pub struct PggmTruth {
    pub omega: Spd<f64>,
    pub delta: DMatrix<f64>,
}

/// `Ω = 2C⁻¹` with `C_jk = 0.5^{|j−k|}`.
pub fn ar_precision(q: usize) -> Spd<f64> {
    let c = DMatrix::from_fn(q, q, |j, k| 0.5f64.powi((j as i32 - k as i32).abs()));
    let c = Spd::new_unchecked(c);
    c.inverse().expect("AR(1) correlation is SPD").scale(2.0).expect("positive factor")
}

/// Synthetic data: `x_ij ∼ U(0, 1/3)`, `Ω = 2C⁻¹`, each `Δ_k` zero or
/// `N_q(0, Ω)` with probability 1/2, then `y_i ∼ N_q(Ω⁻¹Δx_i, Ω⁻¹)`.
pub fn simulate_pggm<R: Rng + ?Sized>(n: usize, p: usize, q: usize, rng: &mut R) -> Result<(PggmData, PggmTruth)> {
    let x = DMatrix::from_fn(n, p, |_, _| rng.random::<f64>() / 3.0);
    let omega = ar_precision(q);
    let l = omega.cholesky()?.l();
    let mut delta = DMatrix::zeros(q, p);
    for k in 0..p {
        let slab = rng.random::<f64>() >= 0.5;
        let z = DVector::from_fn(q, |_, _| rng.sample::<f64, _>(StandardNormal));
        if slab {
            delta.set_column(k, &(&l * z));
        }
    }
    let sigma = omega.inverse()?;
    let sl = sigma.cholesky()?.l();
    let mean = x.clone() * delta.transpose() * sigma.as_matrix();
    let noise = standard_normal_matrix(n, q, rng) * sl.transpose();
    let y = mean + noise;
    Ok((PggmData::new(y, x)?, PggmTruth { omega, delta }))
}

/// Mean squared entrywise error.
pub fn mse(estimate: &DMatrix<f64>, truth: &DMatrix<f64>) -> f64 {
    (estimate - truth).map(|v| v * v).sum() / estimate.len() as f64
}

/// Draw from the Wishart prior of `Ω`; used to start tests away from `I`.
pub fn sample_omega_prior<R: Rng + ?Sized>(hyper: &PggmHyper, rng: &mut R) -> Result<Spd<f64>> {
    WishartParams::new(hyper.u, hyper.v.clone())?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgig::log_density_unnorm;
    use crate::random::RngStream;

    fn instance(seed: u64) -> (PggmData, PggmHyper, PggmState) {
        let mut rng = RngStream::new(seed, 0);
        let (data, truth) = simulate_pggm(6, 4, 3, &mut rng).unwrap();
        let hyper = PggmHyper::standard(3, 4);
        let mut state = PggmState::initial(3, 4);
        state.delta = truth.delta.clone();
        state.delta.set_column(0, &DVector::from_vec(vec![0.3, -0.2, 0.5]));
        state.delta.column_mut(1).fill(0.0);
        state.delta.set_column(2, &DVector::from_vec(vec![-0.4, 0.1, 0.2]));
        state.delta.set_column(3, &DVector::from_vec(vec![0.2, 0.6, -0.1]));
        state.lambda = vec![0.7, 1.3, 2.0, 0.4];
        state.pi = 0.35;
        (data, hyper, state)
    }

    #[test]
    fn omega_conditional_slice_constancy() {
        let (data, hyper, mut state) = instance(1);
        let mut rng = RngStream::new(2, 0);
        let mut diffs = vec![];
        for _ in 0..6 {
            state.omega = sample_omega_prior(&hyper, &mut rng).unwrap().scale(3.0).unwrap();
            let cond = pggm_omega_conditional(&state, &data, &hyper).unwrap();
            assert!(!cond.is_degenerate());
            let joint = pggm_log_joint(&state, &data, &hyper).unwrap();
            diffs.push(joint - log_density_unnorm(&state.omega, &cond.params).unwrap());
        }
        for d in &diffs {
            assert!((d - diffs[0]).abs() < 1e-8, "{diffs:?}");
        }
    }

    #[test]
    fn all_zero_delta_is_degenerate() {
        let (data, hyper, mut state) = instance(3);
        state.delta.fill(0.0);
        let cond = pggm_omega_conditional(&state, &data, &hyper).unwrap();
        assert!(cond.is_degenerate());
        assert_eq!(cond.gamma_rank, 0);
        assert!(cond.gamma.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn column_conditional_matches_joint() {
        let (data, hyper, mut state) = instance(4);
        state.omega = Spd::new(DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.5, -0.2, 0.0, -0.2, 1.0])).unwrap();
        let k = 2;
        let omega_inv = state.omega.inverse().unwrap();
        let (_, h, s) = column_terms(k, &state, &data, omega_inv.as_matrix());
        let mean = state.omega.as_matrix() * &h / s;
        let prec = Spd::new(omega_inv.as_matrix() * s).unwrap();
        // slab part: joint minus Gaussian kernel is flat in Δ_k
        let mut vals = vec![];
        for shift in [[0.0, 0.0, 0.0], [0.1, -0.3, 0.2], [-0.5, 0.4, 0.1]] {
            let x = &mean + DVector::from_row_slice(&shift);
            state.delta.set_column(k, &x);
            let joint = pggm_log_joint(&state, &data, &hyper).unwrap();
            let dx = &x - &mean;
            vals.push(joint + 0.5 * dx.dot(&(prec.as_matrix() * &dx)));
        }
        for v in &vals {
            assert!((v - vals[0]).abs() < 1e-8, "{vals:?}");
        }
        // spike vs integrated slab
        let log_slab = vals[0] + 1.5 * (2.0 * std::f64::consts::PI).ln() - 0.5 * prec.log_det().unwrap();
        state.delta.column_mut(k).fill(0.0);
        let log_spike = pggm_log_joint(&state, &data, &hyper).unwrap();
        let p0 = spike_probability(k, &state, &data).unwrap();
        assert!(((p0 / (1.0 - p0)).ln() - (log_spike - log_slab)).abs() < 1e-8);
    }

    #[test]
    fn all_zero_pi_update_counts() {
        let (data, hyper, mut state) = instance(5);
        // A huge λ_k makes the slab Bayes factor vanish, so every column is spiked.
        state.lambda = vec![1e300; 4];
        state.pi = 1.0 - 1e-12;
        let mut rng = RngStream::new(6, 0);
        let mut replay = rng.clone();
        pggm_gibbs_step(&mut state, &data, &hyper, OmegaUpdate::Mi, &mut rng).unwrap();
        assert_eq!(state.n_zero(), 4);
        // replay: 4 × (uniform, λ_k draw), then π ∼ Be(a+p, b)
        for k in 0..4 {
            let _: f64 = replay.random();
            sample_gig(&GigParams::new(hyper.alpha, 2.0 * hyper.ell[k], 0.0).unwrap(), &mut replay);
        }
        let expect = Beta::new(hyper.a + 4.0, hyper.b).unwrap().sample(&mut replay);
        assert_eq!(state.pi, expect);
    }

    #[test]
    fn mi_plugs_in_the_mode() {
        let (data, hyper, mut state) = instance(7);
        pggm_gibbs_step(&mut state, &data, &hyper, OmegaUpdate::Mi, &mut RngStream::new(8, 0)).unwrap();
        // Ω is updated last, so it solves the Riccati equation of the final conditional
        let c = pggm_omega_conditional(&state, &data, &hyper).unwrap();
        let res = crate::linalg::riccati_residual(c.params.lambda, &c.params.psi, &c.params.gamma, &state.omega);
        assert!(res < 1e-9 * c.params.psi.as_matrix().amax(), "{res}");
        let again = update_omega(&Spd::identity(3), &c, OmegaUpdate::Mi, &mut RngStream::new(99, 0)).unwrap();
        assert_eq!(again.as_matrix(), state.omega.as_matrix());
    }
}
