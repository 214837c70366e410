//! `MGIG_p(λ, Ψ, ΘΘᵀ)` with rank-deficient `Γ` through the Matsumoto-Yor
//! composition: if `X ∼ MGIG_q(−λ−1−q, ΘᵀΨΘ, I)` and `Y ∼ W_p(2λ+p+1, Ψ⁻¹)`
//! independently, then `ΘXΘᵀ + Y ∼ MGIG_p(λ, Ψ, ΘΘᵀ)`.

use rand::Rng;

use super::chain::{default_init, Sampler};
use super::params::{DegenerateMgigParams, MgigParams, SamplerKind};
use crate::error::{Error, Result};
use crate::linalg::Spd;
use crate::random::{sample_gig, GigParams, WishartParams, WishartSampler};

#[derive(Debug, Clone)]
enum Inner {
    Empty,
    /// `X ∼ GIG(−λ−1, θᵀΨθ, 1)`.
    Scalar(GigParams),
    /// Chain on `Z = X⁻¹ ∼ MGIG_q(λ, I, ΘᵀΨΘ)`.
    Chain { sampler: Box<Sampler>, iters: usize },
}

/// Repeated composed draws. For `q ≥ 2` the inner chain persists across
/// draws and advances `inner_iters` steps per draw.
#[derive(Debug, Clone)]
pub struct MatsumotoYorSampler {
    params: DegenerateMgigParams,
    inner: Inner,
    wishart: WishartSampler,
}

impl MatsumotoYorSampler {
    pub fn new(p: &DegenerateMgigParams, inner_kind: SamplerKind, inner_iters: usize) -> Result<Self> {
        let dim = p.dim() as f64;
        let wishart = WishartParams::new(2.0 * p.lambda + dim + 1.0, p.psi.inverse()?)?.sampler()?;
        let q = p.rank();
        let inner = match q {
            0 => Inner::Empty,
            1 => {
                let t = p.theta.column(0);
                let a = t.dot(&(p.psi.as_matrix() * t));
                Inner::Scalar(GigParams::new(-p.lambda - 1.0, a, 1.0)?)
            }
            _ => {
                if inner_iters == 0 {
                    return Err(Error::InvalidParams("inner_iters must be at least 1".into()));
                }
                let tpt = Spd::new(p.theta.transpose() * p.psi.as_matrix() * &p.theta)?;
                let z = MgigParams::new(p.lambda, Spd::identity(q), tpt)?;
                let init = default_init(&z);
                Inner::Chain {
                    sampler: Box::new(Sampler::new(&z, inner_kind, init)?),
                    iters: inner_iters,
                }
            }
        };
        Ok(Self {
            params: p.clone(),
            inner,
            wishart,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Spd<f64>> {
        let theta = &self.params.theta;
        let low_rank = match &mut self.inner {
            Inner::Empty => None,
            Inner::Scalar(g) => {
                let x = sample_gig(g, rng);
                Some(theta * theta.transpose() * x)
            }
            Inner::Chain { sampler, iters } => {
                for _ in 0..*iters {
                    sampler.step(rng)?;
                }
                let x = sampler.current()?.inverse()?;
                Some(theta * x.as_matrix() * theta.transpose())
            }
        };
        let y = self.wishart.sample(rng);
        Ok(match low_rank {
            None => y,
            Some(m) => Spd::new_unchecked(m + y.as_matrix()),
        })
    }
}

/// One composed draw. `inner_iters` steps of `inner_kind` approximate the
/// `q × q` factor when `q ≥ 2`; `q = 1` draws it exactly.
pub fn sample_via_matsumoto_yor<R: Rng + ?Sized>(
    p: &DegenerateMgigParams,
    rng: &mut R,
    inner_kind: SamplerKind,
    inner_iters: usize,
) -> Result<Spd<f64>> {
    MatsumotoYorSampler::new(p, inner_kind, inner_iters)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::RngStream;
    use nalgebra::DMatrix;

    #[test]
    fn rank_one_is_gig_plus_wishart() {
        let lambda = 2.0;
        let theta = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let p = DegenerateMgigParams::new(lambda, Spd::identity(2), theta).unwrap();
        let mut rng = RngStream::new(4, 0);
        let mut replay = rng.clone();
        let out = sample_via_matsumoto_yor(&p, &mut rng, SamplerKind::Gs, 10).unwrap();
        let x = sample_gig(&GigParams::new(-lambda - 1.0, 1.0, 1.0).unwrap(), &mut replay);
        let y = WishartParams::new(2.0 * lambda + 3.0, Spd::identity(2)).unwrap().sample(&mut replay).unwrap();
        let mut expect = y.into_inner();
        expect[(0, 0)] += x;
        assert!((out.as_matrix() - expect).amax() < 1e-12);
    }

    #[test]
    fn rank_two_output_is_spd() {
        let theta = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.5, 1.0, 0.0, 0.3]);
        let p = DegenerateMgigParams::new(0.5, Spd::identity(3), theta).unwrap();
        let mut s = MatsumotoYorSampler::new(&p, SamplerKind::Gs, 3).unwrap();
        let mut rng = RngStream::new(5, 0);
        for _ in 0..20 {
            let d = s.sample(&mut rng).unwrap();
            assert!(Spd::new(d.into_inner()).is_ok());
        }
    }
}
