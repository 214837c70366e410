//! Monte Carlo estimate of the MH1 average acceptance rate
//! `E[min(1, exp{−tr Γ(Σ_new⁻¹ − Σ_old⁻¹)/2})]` with `Σ_old` from the target
//! and `Σ_new` from the Wishart proposal.
//!
//! For an independence sampler with weight `w = π/q` the rate equals
//! `2 P[w(Σ_new) ≥ w(Σ_old)]`, here `2 P[tr ΓΣ_new⁻¹ ≤ tr ΓΣ_old⁻¹]`.

use rand::Rng;

use super::summary::mean_and_se;
use crate::error::{Error, Result};
use crate::linalg::{trace_product, Spd};
use crate::mgig::{default_init, MgigParams, Sampler, SamplerKind};
use crate::random::WishartParams;

pub const DEFAULT_GS_GAP: usize = 10;
const MIN_PAIRS: usize = 100;
/// GS scans discarded before the first `Σ_old`.
const GS_BURN_IN: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AarEstimate {
    /// `2 × proportion`, in `[0, 2]`.
    pub value: f64,
    /// `2 √(p̂(1 − p̂)/n)`.
    pub mc_std_error: f64,
    pub n_pairs: usize,
    /// Sample mean of the acceptance probabilities.
    pub expectation: f64,
    pub expectation_std_error: f64,
}

/// Whether the pair counts toward the probability form.
pub fn aar_indicator(gamma: &Spd<f64>, old: &Spd<f64>, new: &Spd<f64>) -> Result<bool> {
    let t_old = trace_product(gamma.as_matrix(), old.inverse()?.as_matrix());
    let t_new = trace_product(gamma.as_matrix(), new.inverse()?.as_matrix());
    Ok(t_new <= t_old)
}

pub fn estimate_aar<R: Rng + ?Sized>(
    p: &MgigParams,
    n_pairs: usize,
    rng: &mut R,
    gs_subsample_gap: usize,
) -> Result<AarEstimate> {
    if p.lambda <= -1.0 {
        return Err(Error::LambdaTooSmall { lambda: p.lambda });
    }
    if n_pairs < MIN_PAIRS {
        return Err(Error::InvalidParams(format!("need at least {MIN_PAIRS} pairs, got {n_pairs}")));
    }
    if gs_subsample_gap == 0 {
        return Err(Error::InvalidParams("subsample gap must be at least 1".into()));
    }
    let dim = p.dim() as f64;
    let proposal = WishartParams::new(2.0 * p.lambda + dim + 1.0, p.psi.inverse()?)?.sampler()?;
    let mut gs = Sampler::new(p, SamplerKind::Gs, default_init(p))?;
    for _ in 0..GS_BURN_IN {
        gs.step(rng)?;
    }
    let g = p.gamma.as_matrix();
    let mut hits = 0usize;
    let mut probs = Vec::with_capacity(n_pairs);
    for _ in 0..n_pairs {
        let mut old = None;
        for _ in 0..gs_subsample_gap {
            old = Some(gs.step(rng)?.sigma);
        }
        let old = old.expect("gap is positive");
        let new = proposal.sample(rng);
        let t_old = trace_product(g, old.inverse()?.as_matrix());
        let t_new = match new.inverse() {
            Ok(inv) => trace_product(g, inv.as_matrix()),
            Err(Error::NotSpd) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        if t_new <= t_old {
            hits += 1;
        }
        probs.push((-0.5 * (t_new - t_old)).min(0.0).exp());
    }
    let n = n_pairs as f64;
    let phat = hits as f64 / n;
    let (expectation, expectation_std_error) = mean_and_se(&probs);
    Ok(AarEstimate {
        value: 2.0 * phat,
        mc_std_error: 2.0 * (phat * (1.0 - phat) / n).sqrt(),
        n_pairs,
        expectation,
        expectation_std_error,
    })
}
