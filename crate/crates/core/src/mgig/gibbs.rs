//! One scan of the blocked Gibbs sampler on `Σ = B A Bᵀ`.
//!
//! The `b_i` updates use the simplified form of the block conditional:
//! `N_i = a_i Ψ_sub + (M̄_i)_ii Q_sub` and `n_i = −a_i Ψ_{sub,i} + Q_sub (M̄_i)_{sub,i}`,
//! with `sub = (i+1):p`, `Q = B⁻ᵀA⁻¹B⁻¹` from the pre-scan `B`, and `M̄_i`
//! carried across blocks by the rank-two update `M̄ ← B̄_i M̄ B̄_iᵀ`.

use nalgebra::DVector;
use rand::Rng;

use super::params::MgigParams;
use crate::error::{Error, Result};
use crate::linalg::{column_offset, unit_lower_inverse, Spd, UnitCholesky};
use crate::random::{sample_gig, sample_mvn_precision, GigParams, MvnPrecisionParams};

pub fn gibbs_step<R: Rng + ?Sized>(state: &UnitCholesky<f64>, p: &MgigParams, rng: &mut R) -> Result<UnitCholesky<f64>> {
    let mut next = state.clone();
    gibbs_step_in_place(&mut next, p, rng)?;
    Ok(next)
}

pub fn gibbs_step_in_place<R: Rng + ?Sized>(state: &mut UnitCholesky<f64>, p: &MgigParams, rng: &mut R) -> Result<()> {
    let dim = p.dim();
    if state.dim() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            found: state.dim(),
        });
    }
    let psi = p.psi.as_matrix();
    let gamma = p.gamma.as_matrix();

    // step 1
    let bm = state.unit_lower();
    let binv = unit_lower_inverse(&bm);
    let psi_b = psi * &bm;
    let binv_g = &binv * gamma;

    // step 2
    for k in 0..dim {
        let alpha = bm.column(k).dot(&psi_b.column(k));
        let beta = binv_g.row(k).dot(&binv.row(k));
        let g = GigParams::new(p.lambda + (dim - k) as f64, alpha, beta)?;
        state.a_mut()[k] = sample_gig(&g, rng);
    }
    if dim == 1 {
        return Ok(());
    }

    // step 4: Q = B⁻ᵀ A*⁻¹ B⁻¹
    let mut scaled = binv.clone();
    for (k, ak) in state.a().iter().enumerate() {
        scaled.row_mut(k).scale_mut(1.0 / ak);
    }
    let q = binv.transpose() * scaled;

    // steps 5-6
    let mut m_bar = gamma.clone();
    for k in 0..dim - 1 {
        let i = k + 1;
        let s = dim - i;
        let ak = state.a()[k];
        let mkk = m_bar[(k, k)];
        let q_sub = q.view((i, i), (s, s));
        let prec = psi.view((i, i), (s, s)) * ak + q_sub * mkk;
        let n = q_sub * m_bar.view((i, k), (s, 1)) - psi.view((i, k), (s, 1)) * ak;
        let mvn = MvnPrecisionParams {
            precision_times_mean: DVector::from_column_slice(n.as_slice()),
            precision: Spd::new_unchecked(prec),
        };
        let draw = sample_mvn_precision(&mvn, rng)?;
        let start = column_offset(dim, k);
        state.b_mut()[start..start + s].copy_from_slice(draw.as_slice());

        // M̄ ← (I − u e_kᵀ) M̄ (I − e_k uᵀ), u supported on rows i..p
        let row_k: Vec<f64> = (0..dim).map(|c| m_bar[(k, c)]).collect();
        for r in 0..s {
            let ur = draw[r];
            for c in 0..dim {
                m_bar[(i + r, c)] -= ur * row_k[c];
            }
        }
        let col_k: Vec<f64> = (0..dim).map(|r| m_bar[(r, k)]).collect();
        for c in 0..s {
            let uc = draw[c];
            for r in 0..dim {
                m_bar[(r, i + c)] -= uc * col_k[r];
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgig::conditionals::{cond_a_params, cond_b_params};
    use crate::random::RngStream;
    use nalgebra::DMatrix;

    #[test]
    fn replays_the_literal_conditionals() {
        let psi = Spd::new(DMatrix::from_row_slice(3, 3, &[2.0, 0.4, -0.2, 0.4, 1.5, 0.3, -0.2, 0.3, 1.0])).unwrap();
        let gamma = Spd::new(DMatrix::from_row_slice(3, 3, &[1.0, -0.3, 0.1, -0.3, 2.0, 0.5, 0.1, 0.5, 0.8])).unwrap();
        let p = MgigParams::new(0.4, psi, gamma).unwrap();
        let start = UnitCholesky::new(vec![0.8, 1.3, 0.6], vec![0.2, -0.5, 0.7]).unwrap();
        let mut rng = RngStream::new(21, 4);
        let mut replay = rng.clone();
        let next = gibbs_step(&start, &p, &mut rng).unwrap();

        let a: Vec<f64> = cond_a_params(start.b(), &p)
            .unwrap()
            .iter()
            .map(|g| sample_gig(g, &mut replay))
            .collect();
        let mut b = start.b().to_vec();
        for i in 1..3 {
            let c = cond_b_params(i, &a, &b, &p).unwrap();
            let draw = sample_mvn_precision(&c, &mut replay).unwrap();
            let off = column_offset(3, i - 1);
            b[off..off + 3 - i].copy_from_slice(draw.as_slice());
        }
        assert_eq!(next.a(), &a[..]);
        for (x, y) in next.b().iter().zip(&b) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn scalar_scan_is_one_gig_draw() {
        let p = MgigParams::new(2.0, Spd::from_diagonal(&[2.0]).unwrap(), Spd::from_diagonal(&[2.0]).unwrap()).unwrap();
        let mut rng = RngStream::new(5, 0);
        let mut replay = rng.clone();
        let next = gibbs_step(&UnitCholesky::identity(1), &p, &mut rng).unwrap();
        let expect = sample_gig(&GigParams::new(3.0, 2.0, 2.0).unwrap(), &mut replay);
        assert_eq!(next.a()[0], expect);
    }
}
