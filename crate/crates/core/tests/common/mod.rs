#![allow(dead_code)]

use mgig_core::linalg::{packed_len, Spd, UnitCholesky};
use mgig_core::mgig::MgigParams;
use mgig_core::random::{standard_normal_matrix, RngStream};
use nalgebra::DMatrix;
use rand::Rng;

pub fn random_spd(p: usize, rng: &mut RngStream) -> Spd<f64> {
    let a = standard_normal_matrix(p, p, rng);
    Spd::new(&a * a.transpose() / p as f64 + DMatrix::identity(p, p) * 0.3).unwrap()
}

pub fn random_params(p: usize, rng: &mut RngStream) -> MgigParams {
    let lambda = rng.random_range(-3.0..3.0);
    MgigParams::new(lambda, random_spd(p, rng), random_spd(p, rng)).unwrap()
}

pub fn random_factors(p: usize, rng: &mut RngStream) -> UnitCholesky<f64> {
    let a = (0..p).map(|_| rng.random_range(0.5..2.0)).collect();
    let b = (0..packed_len(p)).map(|_| rng.random_range(-1.0..1.0)).collect();
    UnitCholesky::new(a, b).unwrap()
}

pub fn assert_flat(v: &[f64], tol: f64) {
    for x in v {
        assert!((x - v[0]).abs() < tol, "not constant: {v:?}");
    }
}
