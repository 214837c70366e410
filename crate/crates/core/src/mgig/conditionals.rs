//! Full conditionals of the unit-Cholesky coordinates `Σ = B A Bᵀ`.
//!
//! The joint density of `(a, b)` is
//! `∏ a_i^{λ+p−i} exp{−tr(A^{1/2}BᵀΨBA^{1/2} + A^{−1/2}B⁻¹ΓB⁻ᵀA^{−1/2})/2}`.

use nalgebra::{DMatrix, DVector};

use super::params::MgigParams;
use crate::error::{Error, Result};
use crate::linalg::{packed_len, unit_lower_from_packed, unit_lower_inverse, Spd, UnitCholesky};
use crate::random::{GigParams, MvnPrecisionParams};

/// Log-density of `(a, b)`, up to a constant: the MGIG log-density at
/// `B A Bᵀ` plus the change-of-variables term `Σ (p−i) ln a_i`.
pub fn log_density_ab(f: &UnitCholesky<f64>, p: &MgigParams) -> Result<f64> {
    let dim = p.dim();
    if f.dim() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            found: f.dim(),
        });
    }
    let (alpha, beta) = diag_quadratics(f.b(), p);
    let mut out = 0.0;
    for (k, &ak) in f.a().iter().enumerate() {
        if ak <= 0.0 {
            return Err(Error::NonPositiveDiagonal { index: k });
        }
        // a_i^{λ+p−i} with i = k + 1
        out += (p.lambda + (dim - 1 - k) as f64) * ak.ln() - 0.5 * (ak * alpha[k] + beta[k] / ak);
    }
    Ok(out)
}

/// `((BᵀΨB)_ii, (B⁻¹ΓB⁻ᵀ)_ii)`.
fn diag_quadratics(b: &[f64], p: &MgigParams) -> (Vec<f64>, Vec<f64>) {
    let dim = p.dim();
    let bm = unit_lower_from_packed(dim, b);
    let binv = unit_lower_inverse(&bm);
    let psi_b = p.psi.as_matrix() * &bm;
    let binv_g = &binv * p.gamma.as_matrix();
    let alpha = (0..dim).map(|k| bm.column(k).dot(&psi_b.column(k))).collect();
    let beta = (0..dim).map(|k| binv_g.row(k).dot(&binv.row(k))).collect();
    (alpha, beta)
}

/// The independent GIG laws of `a_1, …, a_p` given `b`:
/// `a_i ∼ GIG(λ+p−i+1, (BᵀΨB)_ii, (B⁻¹ΓB⁻ᵀ)_ii)`.
pub fn cond_a_params(b: &[f64], p: &MgigParams) -> Result<Vec<GigParams>> {
    let dim = p.dim();
    if b.len() != packed_len(dim) {
        return Err(Error::DimMismatch {
            expected: packed_len(dim),
            found: b.len(),
        });
    }
    let (alpha, beta) = diag_quadratics(b, p);
    (0..dim)
        .map(|k| GigParams::new(p.lambda + (dim - k) as f64, alpha[k], beta[k]))
        .collect()
}

/// Elementary factor `B_i`: identity with column `i` (1-based) set to
/// `(0, …, 0, 1, b_i)`. `B = B_1 ⋯ B_{p−1}` and `B_i⁻¹ = 2I − B_i`.
fn elementary(dim: usize, i: usize, f_b: &[f64]) -> DMatrix<f64> {
    let mut m = DMatrix::identity(dim, dim);
    if i < dim {
        let start = crate::linalg::column_offset(dim, i - 1);
        for (h, v) in f_b[start..start + dim - i].iter().enumerate() {
            m[(i + h, i - 1)] = *v;
        }
    }
    m
}

fn elementary_bar(dim: usize, i: usize, f_b: &[f64]) -> DMatrix<f64> {
    DMatrix::identity(dim, dim) * 2.0 - elementary(dim, i, f_b)
}

/// Gaussian law of the block `b_i` (1-based `i`, `1 ≤ i ≤ p−1`) given `a`
/// and the other blocks, as `N(N_i⁻¹ n_i, N_i⁻¹)` with
///
/// * `N_i = a_i Ψ_{(i+1):p,(i+1):p} + (M̄_i)_{ii} Q_{(i+1):p,(i+1):p}`,
/// * `n_i = −(M_i)_{(i+1):p,:} R_i (R_i)_{i,:}ᵀ + (R̄_i)_{(i+1):p,:} R̄_iᵀ (M̄_i)_{i,:}ᵀ`,
///
/// where `M_i = (B_1⋯B_{i−1})ᵀ Ψ (B_1⋯B_{i−1})`, `R_i = B_{i+1}⋯B_p A^{1/2}`,
/// `M̄_i = B̄_{i−1}⋯B̄_1 Γ (B̄_{i−1}⋯B̄_1)ᵀ`, `R̄_i = B̄_{i+1}ᵀ⋯B̄_pᵀ A^{−1/2}` and
/// `Q = B⁻ᵀA⁻¹B⁻¹`. This evaluates the products literally; the sampler uses
/// an equivalent `O(p²)`-per-block recursion.
pub fn cond_b_params(i: usize, a: &[f64], b: &[f64], p: &MgigParams) -> Result<MvnPrecisionParams> {
    let dim = p.dim();
    if dim < 2 || i == 0 || i >= dim {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: dim.saturating_sub(1),
        });
    }
    if a.len() != dim {
        return Err(Error::DimMismatch {
            expected: dim,
            found: a.len(),
        });
    }
    if b.len() != packed_len(dim) {
        return Err(Error::DimMismatch {
            expected: packed_len(dim),
            found: b.len(),
        });
    }
    if let Some(index) = a.iter().position(|x| *x <= 0.0) {
        return Err(Error::NonPositiveDiagonal { index });
    }
    let eye = DMatrix::<f64>::identity(dim, dim);
    let a_half = DMatrix::from_diagonal(&DVector::from_iterator(dim, a.iter().map(|x| x.sqrt())));
    let a_mhalf = DMatrix::from_diagonal(&DVector::from_iterator(dim, a.iter().map(|x| 1.0 / x.sqrt())));
    let a_inv = DMatrix::from_diagonal(&DVector::from_iterator(dim, a.iter().map(|x| 1.0 / x)));

    let prefix = (1..i).fold(eye.clone(), |acc, j| acc * elementary(dim, j, b));
    let m = prefix.transpose() * p.psi.as_matrix() * &prefix;
    let r = (i + 1..=dim).fold(eye.clone(), |acc, j| acc * elementary(dim, j, b)) * &a_half;
    let prefix_bar = (1..i).fold(eye.clone(), |acc, j| elementary_bar(dim, j, b) * acc);
    let m_bar = &prefix_bar * p.gamma.as_matrix() * prefix_bar.transpose();
    let r_bar = (i + 1..=dim).fold(eye.clone(), |acc, j| acc * elementary_bar(dim, j, b).transpose()) * &a_mhalf;
    let binv = unit_lower_inverse(&unit_lower_from_packed(dim, b));
    let q = binv.transpose() * a_inv * &binv;

    let k = i - 1;
    let s = dim - i;
    let psi_sub = p.psi.as_matrix().view((i, i), (s, s));
    let q_sub = q.view((i, i), (s, s));
    let prec = psi_sub * a[k] + q_sub * m_bar[(k, k)];
    let term1 = m.rows(i, s) * &r * r.row(k).transpose();
    let term2 = r_bar.rows(i, s) * r_bar.transpose() * m_bar.row(k).transpose();
    let n = term2 - term1;
    MvnPrecisionParams::new(n, Spd::new_unchecked(prec))
}
