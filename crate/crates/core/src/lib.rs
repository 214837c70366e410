//! Samplers for the matrix generalized inverse Gaussian distribution
//! `MGIG_p(λ, Ψ, Γ) ∝ |Σ|^λ exp{−tr(ΨΣ + ΓΣ⁻¹)/2}` and two Bayesian models
//! that use it as a full conditional.
//!
//! The dense kernels in [`linalg`] are generic over the scalar type; the
//! samplers run on `f64`. The aliases below name the `f64` instances.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod mgig;
pub mod models;
pub mod random;

pub use error::{Error, Result};

pub type SymMatrix = linalg::Sym<f64>;
pub type SpdMatrix = linalg::Spd<f64>;
pub type CholeskyFactors = linalg::UnitCholesky<f64>;
pub type EigenSym = linalg::SymEigen<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
