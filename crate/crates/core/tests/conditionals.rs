mod common;

use common::{assert_flat, random_factors, random_params};
use mgig_core::linalg::{column_offset, UnitCholesky};
use mgig_core::mgig::{cond_a_params, cond_b_params, log_density_ab};
use mgig_core::random::RngStream;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

fn a_slice(seed: u64, p: usize) {
    let mut rng = RngStream::new(seed, 0);
    let params = random_params(p, &mut rng);
    let f = random_factors(p, &mut rng);
    let gigs = cond_a_params(f.b(), &params).unwrap();
    let diffs: Vec<f64> = (0..5)
        .map(|_| {
            let a: Vec<f64> = (0..p).map(|_| rng.random_range(0.2..3.0)).collect();
            let g = UnitCholesky::new(a.clone(), f.b().to_vec()).unwrap();
            let kernel: f64 = gigs.iter().zip(&a).map(|(g, x)| g.ln_kernel(*x)).sum();
            log_density_ab(&g, &params).unwrap() - kernel
        })
        .collect();
    assert_flat(&diffs, 1e-8);
}

fn b_slice(seed: u64, p: usize) {
    let mut rng = RngStream::new(seed, 1);
    let params = random_params(p, &mut rng);
    let f = random_factors(p, &mut rng);
    for i in 1..p {
        let cond = cond_b_params(i, f.a(), f.b(), &params).unwrap();
        let diffs: Vec<f64> = (0..5)
            .map(|_| {
                let mut b = f.b().to_vec();
                let off = column_offset(p, i - 1);
                let block: Vec<f64> = (0..p - i).map(|_| rng.random_range(-1.5..1.5)).collect();
                b[off..off + p - i].copy_from_slice(&block);
                let g = UnitCholesky::new(f.a().to_vec(), b).unwrap();
                log_density_ab(&g, &params).unwrap() - cond.ln_pdf(&DVector::from_vec(block)).unwrap()
            })
            .collect();
        assert_flat(&diffs, 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn a_conditional_slice_constancy(seed in any::<u64>(), p in 2usize..=4) {
        a_slice(seed, p);
    }

    #[test]
    fn b_conditional_slice_constancy(seed in any::<u64>(), p in 2usize..=4) {
        b_slice(seed, p);
    }
}

#[test]
fn scalar_a_conditional_slice_constancy() {
    a_slice(7, 1);
}
