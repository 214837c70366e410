//! Dense symmetric and SPD kernels.

pub mod cholesky;
pub mod eigen;
pub mod riccati;
pub mod scalar;
pub mod sym;

pub use cholesky::{column_offset, packed_len, unit_lower_from_packed, unit_lower_inverse, UnitCholesky};
pub use eigen::{matrix_exp_sym, matrix_log_spd, psd_factor, psd_rank, spd_inv_sqrt, spd_sqrt, SymEigen};
pub use riccati::{riccati_residual, solve_riccati};
pub use scalar::{Field, Real};
pub use sym::{trace_product, Spd, Sym, Tolerances};
