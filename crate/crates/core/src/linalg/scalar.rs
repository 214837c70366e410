use std::ops::Neg;

use nalgebra::{ClosedAddAssign, ClosedDivAssign, ClosedMulAssign, ClosedSubAssign, RealField};
use num_traits::{FromPrimitive, One, Zero};

/// Ordered field arithmetic. Enough for the unit-diagonal Cholesky
/// factorization, its inverse and determinant, so those routines also run
/// on exact rationals.
pub trait Field:
    nalgebra::Scalar
    + Zero
    + One
    + PartialOrd
    + ClosedAddAssign
    + ClosedSubAssign
    + ClosedMulAssign
    + ClosedDivAssign
    + Neg<Output = Self>
{
}

impl<T> Field for T where
    T: nalgebra::Scalar
        + Zero
        + One
        + PartialOrd
        + ClosedAddAssign
        + ClosedSubAssign
        + ClosedMulAssign
        + ClosedDivAssign
        + Neg<Output = Self>
{
}

/// Floating-point scalars (`f32`, `f64`) for the spectral routines.
pub trait Real: Field + RealField + Copy + FromPrimitive {
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("representable literal")
    }
}

impl<T> Real for T where T: Field + RealField + Copy + FromPrimitive {}
