use std::ops::Deref;

use nalgebra::{Cholesky, DMatrix, Dyn};

use super::eigen::SymEigen;
use super::scalar::Real;
use crate::error::{Error, Result};

/// Numerical thresholds shared by the matrix kernels and samplers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed asymmetry, relative to `max(1, max |m_ij|)`.
    pub tol_sym: f64,
    /// Smallest eigenvalue must exceed `eps_spd` times the largest.
    pub eps_spd: f64,
    /// Relative gap below which two eigenvalues are treated as equal.
    pub coincident_eig: f64,
    /// Singular values below `rank * largest` count as zero.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_sym: 1e-10,
            eps_spd: 1e-12,
            coincident_eig: 1e-12,
            rank: 1e-10,
        }
    }
}

fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

fn symmetrize<T: Real>(m: &mut DMatrix<T>) {
    let n = m.nrows();
    let half = T::lit(0.5);
    for j in 0..n {
        for i in (j + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)]) * half;
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

/// Real symmetric matrix. Entries are exactly symmetric after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Sym<T: Real> {
    m: DMatrix<T>,
}

impl<T: Real> Sym<T> {
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(mut m: DMatrix<T>, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::DimMismatch {
                expected: m.nrows().max(1),
                found: m.ncols(),
            });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical("non-finite matrix entry".into()));
        }
        let scale = max_abs(&m).max(T::one());
        let asym = (&m - m.transpose()).iter().fold(T::zero(), |a, x| a.max(x.abs()));
        if asym > T::lit(tol.tol_sym) * scale {
            return Err(Error::NotSymmetric {
                asymmetry: nalgebra::try_convert(asym).unwrap_or(f64::NAN),
            });
        }
        symmetrize(&mut m);
        Ok(Self { m })
    }

    /// Symmetrizes without checking. For values symmetric by construction.
    pub(crate) fn new_unchecked(mut m: DMatrix<T>) -> Self {
        symmetrize(&mut m);
        Self { m }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: DMatrix::zeros(dim, dim) }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        Self {
            m: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn into_inner(self) -> DMatrix<T> {
        self.m
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.m)
    }
}

impl<T: Real> Deref for Sym<T> {
    type Target = DMatrix<T>;
    fn deref(&self) -> &DMatrix<T> {
        &self.m
    }
}

/// Symmetric positive definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spd<T: Real> {
    m: DMatrix<T>,
}

impl<T: Real> Spd<T> {
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    /// Checks symmetry, then positive definiteness through the spectrum.
    pub fn with_tolerances(m: DMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let sym = Sym::with_tolerances(m, tol)?;
        let eig = SymEigen::new(sym.as_matrix());
        let largest = eig.values[0];
        let smallest = eig.values[eig.values.len() - 1];
        if largest <= T::zero() || smallest <= T::lit(tol.eps_spd) * largest {
            return Err(Error::NotSpd);
        }
        Ok(Self { m: sym.into_inner() })
    }

    /// Symmetrizes without the spectral check. For values SPD by construction.
    pub(crate) fn new_unchecked(mut m: DMatrix<T>) -> Self {
        symmetrize(&mut m);
        Self { m }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            m: DMatrix::identity(dim, dim),
        }
    }

    /// Positive diagonal matrix.
    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        if diag.iter().any(|d| *d <= T::zero() || !d.is_finite()) {
            return Err(Error::NotSpd);
        }
        Ok(Self {
            m: DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn into_inner(self) -> DMatrix<T> {
        self.m
    }

    pub fn to_sym(&self) -> Sym<T> {
        Sym { m: self.m.clone() }
    }

    /// Lower Cholesky factor `L` with `L Lᵀ = self`.
    pub fn cholesky(&self) -> Result<Cholesky<T, Dyn>> {
        Cholesky::new(self.m.clone()).ok_or(Error::NotSpd)
    }

    pub fn inverse(&self) -> Result<Spd<T>> {
        Ok(Spd::new_unchecked(self.cholesky()?.inverse()))
    }

    pub fn log_det(&self) -> Result<T> {
        let chol = self.cholesky()?;
        let l = chol.l_dirty();
        let two = T::lit(2.0);
        Ok((0..self.dim()).fold(T::zero(), |acc, i| acc + two * l[(i, i)].ln()))
    }

    /// `c · self`, for `c > 0`.
    pub fn scale(&self, c: T) -> Result<Spd<T>> {
        if c <= T::zero() {
            return Err(Error::NotSpd);
        }
        Ok(Spd { m: &self.m * c })
    }

    /// `C · self · Cᵀ` for a square full-rank `C`.
    pub fn congruence(&self, c: &DMatrix<T>) -> Result<Spd<T>> {
        if c.nrows() != self.dim() || c.ncols() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: c.nrows(),
            });
        }
        Spd::new(c * &self.m * c.transpose())
    }
}

impl<T: Real> Deref for Spd<T> {
    type Target = DMatrix<T>;
    fn deref(&self) -> &DMatrix<T> {
        &self.m
    }
}

/// `tr(A B)` without forming the product.
pub fn trace_product<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    let n = a.nrows();
    let mut acc = T::zero();
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
