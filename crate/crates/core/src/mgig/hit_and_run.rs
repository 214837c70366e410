//! Hit-and-run Metropolis on the matrix-log scale.
//!
//! A symmetric random step `V` is added to `log Σ`. The chain moves in the
//! `p(p+1)/2` coordinates of `S = log Σ`, whose density is the target times
//! the Jacobian of `exp`: `∏_i d_i ∏_{i<j} (d_i − d_j)/(ln d_i − ln d_j)`,
//! with `d` the eigenvalues of `Σ`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::chain::ChainStep;
use super::params::MgigParams;
use crate::error::Result;
use crate::linalg::{trace_product, Spd, SymEigen};

const COINCIDENT: f64 = 1e-12;

/// `Σ` in spectral form `W diag(e^s) Wᵀ`, with its log-weight cached.
#[derive(Debug, Clone)]
pub struct HrState {
    pub sigma: Spd<f64>,
    log_values: Vec<f64>,
    vectors: DMatrix<f64>,
    log_weight: f64,
}

impl HrState {
    pub fn new(sigma: Spd<f64>, p: &MgigParams) -> Self {
        let eig = SymEigen::new(sigma.as_matrix());
        let log_values: Vec<f64> = eig.values.iter().map(|d| d.ln()).collect();
        Self::from_log_spectrum(log_values, eig.vectors, p)
    }

    fn from_log_spectrum(log_values: Vec<f64>, vectors: DMatrix<f64>, p: &MgigParams) -> Self {
        let sigma = Spd::new_unchecked(spectral(&vectors, log_values.iter().map(|s| s.exp())));
        let log_weight = log_weight(&sigma, &log_values, &vectors, p);
        Self {
            sigma,
            log_values,
            vectors,
            log_weight,
        }
    }

    pub fn log_sigma(&self) -> DMatrix<f64> {
        spectral(&self.vectors, self.log_values.iter().copied())
    }
}

fn spectral(vectors: &DMatrix<f64>, values: impl Iterator<Item = f64>) -> DMatrix<f64> {
    let mut scaled = vectors.clone();
    for (j, v) in values.enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    let m = scaled * vectors.transpose();
    (&m + m.transpose()) * 0.5
}

/// `ln[(d_i − d_j)/(ln d_i − ln d_j)]` from the logs `s_i`, `s_j`, with the
/// limit `ln d_i` when the eigenvalues coincide.
pub fn ln_log_mean(si: f64, sj: f64) -> f64 {
    let hi = si.max(sj);
    let delta = (si - sj).abs();
    // |d_i − d_j| / max(d_i, d_j) = 1 − e^{−δ}
    let rel_gap = -(-delta).exp_m1();
    if rel_gap < COINCIDENT {
        return si;
    }
    hi + rel_gap.ln() - delta.ln()
}

fn log_weight(sigma: &Spd<f64>, log_values: &[f64], vectors: &DMatrix<f64>, p: &MgigParams) -> f64 {
    let inv = spectral(vectors, log_values.iter().map(|s| (-s).exp()));
    let log_det: f64 = log_values.iter().sum();
    let target = p.lambda * log_det
        - 0.5 * trace_product(p.psi.as_matrix(), sigma.as_matrix())
        - 0.5 * trace_product(p.gamma.as_matrix(), &inv);
    let mut jac = log_det;
    for i in 0..log_values.len() {
        for j in (i + 1)..log_values.len() {
            jac += ln_log_mean(log_values[i], log_values[j]);
        }
    }
    target + jac
}

/// Log acceptance ratio (before clamping) for a move `old → new`.
pub fn hr_log_ratio(old: &Spd<f64>, new: &Spd<f64>, p: &MgigParams) -> f64 {
    HrState::new(new.clone(), p).log_weight - HrState::new(old.clone(), p).log_weight
}

/// Symmetric `𝓛` from `p(p+1)/2` entries listed row by row over `i ≤ j`.
pub fn symmetric_from_upper(dim: usize, l: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            m[(i, j)] = l[k];
            m[(j, i)] = l[k];
            k += 1;
        }
    }
    m
}

#[derive(Debug, Clone)]
pub struct HrKernel {
    params: MgigParams,
}

impl HrKernel {
    pub fn new(p: &MgigParams) -> Self {
        Self { params: p.clone() }
    }

    pub fn init(&self, sigma: Spd<f64>) -> HrState {
        HrState::new(sigma, &self.params)
    }

    pub fn step<R: Rng + ?Sized>(&self, state: &mut HrState, rng: &mut R) -> Result<ChainStep> {
        let dim = self.params.dim();
        let l: Vec<f64> = (0..dim * (dim + 1) / 2).map(|_| rng.sample(StandardNormal)).collect();
        let v: f64 = rng.sample(StandardNormal);
        let norm = l.iter().map(|x| x * x).sum::<f64>().sqrt();
        let step = symmetric_from_upper(dim, &l) * (v / norm);
        self.transition(state, &step, rng)
    }

    /// Proposes `exp(log Σ + step)` and accepts or rejects it. Consumes one uniform.
    pub fn transition<R: Rng + ?Sized>(&self, state: &mut HrState, step: &DMatrix<f64>, rng: &mut R) -> Result<ChainStep> {
        let s_new = state.log_sigma() + step;
        let s_new = (&s_new + s_new.transpose()) * 0.5;
        let eig = SymEigen::new(&s_new);
        let prop = HrState::from_log_spectrum(eig.values, eig.vectors, &self.params);
        let log_alpha = (prop.log_weight - state.log_weight).min(0.0);
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

/// One hit-and-run step from `state`.
pub fn hr_step<R: Rng + ?Sized>(state: &Spd<f64>, p: &MgigParams, rng: &mut R) -> Result<ChainStep> {
    let kernel = HrKernel::new(p);
    let mut st = kernel.init(state.clone());
    kernel.step(&mut st, rng)
}
