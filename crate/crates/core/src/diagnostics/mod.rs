//! Chain diagnostics and test oracles.

pub mod aar;
pub mod bessel;
pub mod ess;
pub mod summary;

pub use aar::{aar_indicator, estimate_aar, AarEstimate, DEFAULT_GS_GAP};
pub use bessel::{bessel_k, bessel_k_scaled, gig_moment_oracle, ln_bessel_k};
pub use ess::{autocorrelation, ess, ess_matrix_chain, Ess, EssReport};
pub use summary::{chain_summary, mean_and_se, ChainSummary};
