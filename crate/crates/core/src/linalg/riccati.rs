use nalgebra::DMatrix;

use super::eigen::SymEigen;
use super::scalar::Real;
use super::sym::Spd;
use crate::error::{Error, Result};

/// Unique SPD solution `Λ` of `2λΛ − ΛΨΛ + Γ = 0`.
///
/// With `Ψ = L Lᵀ` and `Y = Lᵀ Λ L`, the equation becomes `Y² − 2λY = LᵀΓL`,
/// so `Y = λI + (λ²I + LᵀΓL)^{1/2}` and `Λ = L⁻ᵀ Y L⁻¹`.
pub fn solve_riccati<T: Real>(lambda: T, psi: &Spd<T>, gamma: &Spd<T>) -> Result<Spd<T>> {
    let p = psi.dim();
    if gamma.dim() != p {
        return Err(Error::DimMismatch {
            expected: p,
            found: gamma.dim(),
        });
    }
    let chol = psi.cholesky()?;
    let l = chol.l();
    let m = l.transpose() * gamma.as_matrix() * &l;
    let eig = SymEigen::new(&m);
    let l2 = lambda * lambda;
    let y = eig.map(|mu| {
        let mu = mu.max(T::zero());
        let r = (l2 + mu).sqrt();
        if lambda >= T::zero() {
            lambda + r
        } else if mu == T::zero() {
            // λ + |λ| = 0; the bound on Γ keeps this branch unreachable for SPD input
            T::zero()
        } else {
            mu / (r - lambda)
        }
    });
    let l_inv = l
        .solve_lower_triangular(&DMatrix::identity(p, p))
        .ok_or(Error::NotSpd)?;
    let out = l_inv.transpose() * y * l_inv;
    Ok(Spd::new_unchecked(out))
}

/// `‖2λΛ − ΛΨΛ + Γ‖_max`.
pub fn riccati_residual<T: Real>(lambda: T, psi: &Spd<T>, gamma: &Spd<T>, sol: &Spd<T>) -> T {
    let s = sol.as_matrix();
    let r = s * (T::lit(2.0) * lambda) - s * psi.as_matrix() * s + gamma.as_matrix();
    r.amax()
}
