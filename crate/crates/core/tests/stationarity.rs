use mgig_core::diagnostics::{chain_summary, gig_moment_oracle, ChainSummary};
use mgig_core::linalg::Spd;
use mgig_core::mgig::{sample_chain, MgigParams, SamplerKind};
use mgig_core::random::{GigParams, RngStream};

const KINDS: [SamplerKind; 4] = [SamplerKind::Gs, SamplerKind::Mh1, SamplerKind::Mh2 { rho: 5.0 }, SamplerKind::Hr];

fn summaries(p: &MgigParams, n_iter: usize, seed: u64) -> Vec<(SamplerKind, ChainSummary)> {
    KINDS
        .iter()
        .enumerate()
        .map(|(k, &kind)| {
            let mut rng = RngStream::new(seed, k as u64);
            let chain = sample_chain(p, kind, n_iter, n_iter / 10, 1, &mut rng, None).unwrap();
            (kind, chain_summary(&chain).unwrap())
        })
        .collect()
}

fn assert_pairwise(sums: &[(SamplerKind, ChainSummary)]) {
    let dim = sums[0].1.mean.dim();
    for (x, (ka, a)) in sums.iter().enumerate() {
        for (kb, b) in &sums[x + 1..] {
            for i in 0..dim {
                for j in i..dim {
                    let se = a.std_errors[(i, j)].hypot(b.std_errors[(i, j)]);
                    let d = (a.mean[(i, j)] - b.mean[(i, j)]).abs();
                    assert!(d < 4.0 * se, "{ka} vs {kb} Σ[{i},{j}]: {d} vs 4×{se}");
                    let se = a.inverse_std_errors[(i, j)].hypot(b.inverse_std_errors[(i, j)]);
                    let d = (a.mean_inverse[(i, j)] - b.mean_inverse[(i, j)]).abs();
                    assert!(d < 4.0 * se, "{ka} vs {kb} Σ⁻¹[{i},{j}]: {d} vs 4×{se}");
                }
            }
        }
    }
}

#[test]
fn four_kernels_agree_p2() {
    let p = MgigParams::new(2.0, Spd::identity(2), Spd::identity(2)).unwrap();
    assert_pairwise(&summaries(&p, 40_000, 11));
}

#[test]
fn four_kernels_agree_p3() {
    let p = MgigParams::new(5.0, Spd::identity(3), Spd::identity(3)).unwrap();
    assert_pairwise(&summaries(&p, 40_000, 12));
}

#[test]
fn gs_scalar_matches_bessel_oracle() {
    let p = MgigParams::new(2.0, Spd::from_diagonal(&[2.0]).unwrap(), Spd::from_diagonal(&[2.0]).unwrap()).unwrap();
    let chain = sample_chain(&p, SamplerKind::Gs, 30_000, 1000, 1, &mut RngStream::new(3, 0), None).unwrap();
    let s = chain_summary(&chain).unwrap();
    // MGIG_1(λ, ψ, γ) is GIG(λ+1, ψ, γ)
    let g = GigParams::new(3.0, 2.0, 2.0).unwrap();
    let m = gig_moment_oracle(&g, 1).unwrap();
    assert!((s.mean[(0, 0)] - m).abs() < 4.0 * s.std_errors[(0, 0)]);
    let mi = gig_moment_oracle(&g, -1).unwrap();
    assert!((s.mean_inverse[(0, 0)] - mi).abs() < 4.0 * s.inverse_std_errors[(0, 0)]);
}

#[test]
fn non_identity_parameters_agree() {
    use nalgebra::DMatrix;
    let psi = Spd::new(DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, -0.3, 0.0, -0.3, 3.0])).unwrap();
    let gamma = Spd::new(DMatrix::from_row_slice(3, 3, &[1.0, -0.2, 0.1, -0.2, 0.5, 0.0, 0.1, 0.0, 2.0])).unwrap();
    let p = MgigParams::new(1.5, psi, gamma).unwrap();
    assert_pairwise(&summaries(&p, 40_000, 13));
}
