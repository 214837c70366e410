//! MGIG densities, full conditionals and transition kernels.

pub mod chain;
pub mod conditionals;
pub mod degenerate;
pub mod gibbs;
pub mod hit_and_run;
pub mod mh;
pub mod params;

pub use chain::{default_init, sample_chain, Chain, ChainStep, Sampler};
pub use conditionals::{cond_a_params, cond_b_params, log_density_ab};
pub use degenerate::{sample_via_matsumoto_yor, MatsumotoYorSampler};
pub use gibbs::{gibbs_step, gibbs_step_in_place};
pub use hit_and_run::{hr_log_ratio, hr_step, HrKernel, HrState};
pub use mh::{independent_mh_log_ratio, mh1_log_accept, mh1_step, mh2_step, Mh1Kernel, Mh2Kernel, MhState};
pub use params::{log_density_unnorm, DegenerateMgigParams, MgigParams, SamplerKind};
