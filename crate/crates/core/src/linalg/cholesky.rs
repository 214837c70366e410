//! Unit-diagonal Cholesky parameterization `Σ = B A Bᵀ`.
//!
//! `A = diag(a)` holds the pivots and `B` is unit lower triangular. The
//! strictly-lower entries of `B` are packed column by column, so the block
//! `b_i = (b_{i+1,i}, …, b_{p,i})` of column `i` is contiguous. Only field
//! operations are needed, which lets the same code run on exact rationals.

use nalgebra::DMatrix;

use super::scalar::{Field, Real};
use super::sym::Spd;
use crate::error::{Error, Result};

/// Number of strictly-lower entries of a `p × p` matrix.
pub fn packed_len(p: usize) -> usize {
    p * p.saturating_sub(1) / 2
}

/// Offset of column `j` (0-based) in the packed vector.
pub fn column_offset(p: usize, j: usize) -> usize {
    j * (p - 1) - j * j.saturating_sub(1) / 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitCholesky<T: Field> {
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Field> UnitCholesky<T> {
    /// Builds factors from raw parts. Every `a_i` must be positive.
    pub fn new(a: Vec<T>, b: Vec<T>) -> Result<Self> {
        let p = a.len();
        if p == 0 {
            return Err(Error::DimMismatch { expected: 1, found: 0 });
        }
        if b.len() != packed_len(p) {
            return Err(Error::DimMismatch {
                expected: packed_len(p),
                found: b.len(),
            });
        }
        if let Some(index) = a.iter().position(|x| *x <= T::zero()) {
            return Err(Error::NonPositiveDiagonal { index });
        }
        Ok(Self { a, b })
    }

    /// `B = I`, `A = I`.
    pub fn identity(p: usize) -> Self {
        Self {
            a: vec![T::one(); p],
            b: vec![T::zero(); packed_len(p)],
        }
    }

    /// LDLᵀ factorization of a symmetric matrix. Fails with `NotSpd` on a
    /// non-positive pivot.
    pub fn factor(m: &DMatrix<T>) -> Result<Self> {
        let p = m.nrows();
        if p == 0 || m.ncols() != p {
            return Err(Error::DimMismatch {
                expected: p.max(1),
                found: m.ncols(),
            });
        }
        let mut l = DMatrix::<T>::identity(p, p);
        let mut a: Vec<T> = Vec::with_capacity(p);
        for j in 0..p {
            let mut d = m[(j, j)].clone();
            for k in 0..j {
                d -= l[(j, k)].clone() * l[(j, k)].clone() * a[k].clone();
            }
            if d <= T::zero() {
                return Err(Error::NotSpd);
            }
            for i in (j + 1)..p {
                let mut s = m[(i, j)].clone();
                for k in 0..j {
                    s -= l[(i, k)].clone() * l[(j, k)].clone() * a[k].clone();
                }
                l[(i, j)] = s / d.clone();
            }
            a.push(d);
        }
        let mut b = Vec::with_capacity(packed_len(p));
        for j in 0..p {
            for i in (j + 1)..p {
                b.push(l[(i, j)].clone());
            }
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn a_mut(&mut self) -> &mut [T] {
        &mut self.a
    }

    pub fn b_mut(&mut self) -> &mut [T] {
        &mut self.b
    }

    /// Block `b_i` (1-based `i`), the below-diagonal part of column `i`.
    pub fn block(&self, i: usize) -> &[T] {
        let p = self.dim();
        let start = column_offset(p, i - 1);
        &self.b[start..start + (p - i)]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut [T] {
        let p = self.dim();
        let start = column_offset(p, i - 1);
        &mut self.b[start..start + (p - i)]
    }

    /// The unit lower-triangular factor `B`.
    pub fn unit_lower(&self) -> DMatrix<T> {
        unit_lower_from_packed(self.dim(), &self.b)
    }

    /// `B A Bᵀ`.
    pub fn reconstruct_matrix(&self) -> DMatrix<T> {
        let bmat = self.unit_lower();
        let mut ba = bmat.clone();
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                ba[(i, j)] = ba[(i, j)].clone() * self.a[j].clone();
            }
        }
        ba * bmat.transpose()
    }

    /// `det(B A Bᵀ) = ∏ a_i`.
    pub fn det(&self) -> T {
        self.a.iter().fold(T::one(), |acc, x| acc * x.clone())
    }
}

impl<T: Real> UnitCholesky<T> {
    /// Factors an SPD matrix.
    pub fn from_spd(sigma: &Spd<T>) -> Result<Self> {
        Self::factor(sigma.as_matrix())
    }

    /// `B A Bᵀ` as an SPD matrix.
    pub fn reconstruct(&self) -> Result<Spd<T>> {
        if let Some(index) = self.a.iter().position(|x| *x <= T::zero()) {
            return Err(Error::NonPositiveDiagonal { index });
        }
        Ok(Spd::new_unchecked(self.reconstruct_matrix()))
    }

    pub fn log_det(&self) -> T {
        self.a.iter().fold(T::zero(), |acc, x| acc + x.ln())
    }
}

/// Unit lower-triangular matrix from packed strictly-lower entries.
pub fn unit_lower_from_packed<T: Field>(p: usize, b: &[T]) -> DMatrix<T> {
    let mut m = DMatrix::<T>::identity(p, p);
    let mut k = 0;
    for j in 0..p {
        for i in (j + 1)..p {
            m[(i, j)] = b[k].clone();
            k += 1;
        }
    }
    m
}

/// Inverse of a unit lower-triangular matrix by forward substitution.
pub fn unit_lower_inverse<T: Field>(l: &DMatrix<T>) -> DMatrix<T> {
    let p = l.nrows();
    let mut inv = DMatrix::<T>::identity(p, p);
    for j in 0..p {
        for i in (j + 1)..p {
            let mut s = T::zero();
            for k in j..i {
                s -= l[(i, k)].clone() * inv[(k, j)].clone();
            }
            inv[(i, j)] = s;
        }
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn identity_factors() {
        let f = UnitCholesky::factor(&DMatrix::<f64>::identity(3, 3)).unwrap();
        assert_eq!(f.a(), &[1.0, 1.0, 1.0]);
        assert!(f.b().iter().all(|x| *x == 0.0));
    }

    #[test]
    fn two_by_two_by_hand() {
        // [[2,1],[1,1]] = [[1,0],[1/2,1]] diag(2, 1/2) [[1,1/2],[0,1]]
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let f = UnitCholesky::factor(&m).unwrap();
        assert_eq!(f.a(), &[2.0, 0.5]);
        assert_eq!(f.b(), &[0.5]);
        let back = UnitCholesky::new(vec![2.0, 0.5], vec![0.5]).unwrap().reconstruct_matrix();
        assert_eq!(back, m);
    }

    #[test]
    fn diagonal_factors() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0]);
        let f = UnitCholesky::factor(&m).unwrap();
        assert_eq!(f.a(), &[4.0, 9.0]);
        assert_eq!(f.b(), &[0.0]);
    }

    #[test]
    fn unit_pivots_give_unit_determinant() {
        let f = UnitCholesky::new(vec![q(1, 1); 3], vec![q(3, 2), q(-7, 3), q(5, 1)]).unwrap();
        let m = f.reconstruct_matrix();
        let back = UnitCholesky::factor(&m).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.det(), q(1, 1));
    }

    #[test]
    fn exact_rational_roundtrip_and_determinant() {
        let a = vec![q(2, 3), q(5, 7), q(1, 11), q(13, 2)];
        let b = vec![q(1, 2), q(-3, 4), q(2, 5), q(7, 3), q(-1, 9), q(4, 1)];
        let f = UnitCholesky::new(a.clone(), b.clone()).unwrap();
        let m = f.reconstruct_matrix();
        let back = UnitCholesky::factor(&m).unwrap();
        assert_eq!(back.a(), &a[..]);
        assert_eq!(back.b(), &b[..]);
        // Leibniz-free exact determinant through Gaussian elimination.
        let mut u = m.clone();
        let n = u.nrows();
        let mut det = q(1, 1);
        for c in 0..n {
            let piv = u[(c, c)].clone();
            det *= piv.clone();
            for r in (c + 1)..n {
                let f = u[(r, c)].clone() / piv.clone();
                for k in c..n {
                    let v = u[(c, k)].clone() * f.clone();
                    u[(r, k)] -= v;
                }
            }
        }
        assert_eq!(det, a.iter().fold(q(1, 1), |acc, x| acc * x.clone()));
    }

    #[test]
    fn non_positive_pivot_is_not_spd() {
        let m = DMatrix::from_row_slice(2, 2, &[q(1, 1), q(2, 1), q(2, 1), q(1, 1)]);
        assert_eq!(UnitCholesky::factor(&m), Err(Error::NotSpd));
    }

    #[test]
    fn reconstruct_rejects_non_positive_diagonal() {
        assert_eq!(
            UnitCholesky::new(vec![1.0, 0.0], vec![0.3]),
            Err(Error::NonPositiveDiagonal { index: 1 })
        );
    }

    #[test]
    fn unit_lower_inverse_exact() {
        let l = unit_lower_from_packed(3, &[q(1, 2), q(-2, 1), q(3, 4)]);
        let inv = unit_lower_inverse(&l);
        assert_eq!(&l * &inv, DMatrix::identity(3, 3));
    }

    #[test]
    fn packed_blocks_are_columns() {
        let f = UnitCholesky::new(vec![1.0; 4], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(f.block(1), &[1.0, 2.0, 3.0]);
        assert_eq!(f.block(2), &[4.0, 5.0]);
        assert_eq!(f.block(3), &[6.0]);
        let b = f.unit_lower();
        assert_eq!(b[(3, 1)], 5.0);
    }
}
