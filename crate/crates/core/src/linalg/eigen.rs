use nalgebra::{DMatrix, SymmetricEigen};

use super::scalar::Real;
use super::sym::{Spd, Sym};
use crate::error::{Error, Result};

/// Spectral decomposition `M = V diag(values) Vᵀ` of a symmetric matrix.
///
/// Eigenvalues are sorted in descending order. Ties keep the order in which
/// the underlying solver returned them.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: DMatrix<T>,
}

impl<T: Real> SymEigen<T> {
    /// Decomposes `m`, which is assumed symmetric.
    pub fn new(m: &DMatrix<T>) -> Self {
        let eig = SymmetricEigen::new(m.clone());
        let n = m.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        // stable sort keeps ties in original index order
        order.sort_by(|&i, &j| {
            eig.eigenvalues[j]
                .partial_cmp(&eig.eigenvalues[i])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Self { values, vectors }
    }

    pub fn of_sym(m: &Sym<T>) -> Self {
        Self::new(m.as_matrix())
    }

    /// `V diag(f(values)) Vᵀ`.
    pub fn map(&self, f: impl Fn(T) -> T) -> DMatrix<T> {
        let mut scaled = self.vectors.clone();
        for (j, v) in self.values.iter().enumerate() {
            let fv = f(*v);
            scaled.column_mut(j).scale_mut(fv);
        }
        let mut out = scaled * self.vectors.transpose();
        let n = out.nrows();
        for j in 0..n {
            for i in (j + 1)..n {
                let avg = (out[(i, j)] + out[(j, i)]) * T::lit(0.5);
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> DMatrix<T> {
        self.map(|x| x)
    }
}

/// Matrix exponential of a symmetric matrix. Always SPD.
pub fn matrix_exp_sym<T: Real>(m: &Sym<T>) -> Spd<T> {
    Spd::new_unchecked(SymEigen::of_sym(m).map(|x| x.exp()))
}

/// Principal matrix logarithm of an SPD matrix.
pub fn matrix_log_spd<T: Real>(m: &Spd<T>) -> Sym<T> {
    Sym::new_unchecked(SymEigen::new(m.as_matrix()).map(|x| x.ln()))
}

/// Symmetric square root of an SPD matrix.
pub fn spd_sqrt<T: Real>(m: &Spd<T>) -> Spd<T> {
    Spd::new_unchecked(SymEigen::new(m.as_matrix()).map(|x| x.sqrt()))
}

/// Symmetric inverse square root of an SPD matrix.
pub fn spd_inv_sqrt<T: Real>(m: &Spd<T>) -> Spd<T> {
    Spd::new_unchecked(SymEigen::new(m.as_matrix()).map(|x| T::one() / x.sqrt()))
}

/// Numerical rank of a symmetric PSD matrix: eigenvalues above
/// `rel_tol * largest` are counted.
pub fn psd_rank<T: Real>(m: &DMatrix<T>, rel_tol: T) -> usize {
    let eig = SymEigen::new(m);
    let largest = eig.values.first().copied().unwrap_or(T::zero());
    if largest <= T::zero() {
        return 0;
    }
    eig.values.iter().filter(|v| **v > rel_tol * largest).count()
}

/// Factor `Θ` (`p × r`, full column rank) with `Θ Θᵀ = m` for a PSD matrix.
pub fn psd_factor<T: Real>(m: &DMatrix<T>, rel_tol: T) -> Result<DMatrix<T>> {
    let eig = SymEigen::new(m);
    let largest = eig.values.first().copied().unwrap_or(T::zero());
    if largest <= T::zero() {
        return Ok(DMatrix::zeros(m.nrows(), 0));
    }
    let smallest = *eig.values.last().unwrap();
    if smallest < -rel_tol * largest * T::lit(1e3) {
        return Err(Error::NotSpd);
    }
    let r = eig.values.iter().filter(|v| **v > rel_tol * largest).count();
    let mut theta = DMatrix::zeros(m.nrows(), r);
    for j in 0..r {
        let s = eig.values[j].sqrt();
        theta.set_column(j, &(eig.vectors.column(j) * s));
    }
    Ok(theta)
}
