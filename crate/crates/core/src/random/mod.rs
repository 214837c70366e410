//! Seeded variate generation: GIG, Gaussian by precision, Wishart.

pub mod gig;
pub mod mvn;
pub mod stream;
pub mod wishart;

pub use gig::{sample_gig, GigParams};
pub use mvn::{sample_mvn_precision, standard_normal_matrix, MvnPrecisionParams};
pub use stream::RngStream;
pub use wishart::{ln_mvgamma, InverseWishartParams, WishartParams, WishartSampler};
