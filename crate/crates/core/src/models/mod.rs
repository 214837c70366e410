//! Bayesian models whose posteriors need MGIG draws.

pub mod mst;
pub mod pggm;
