//! Acceptance suite. Runs each criterion at its stated size and tolerance,
//! prints one PASS/FAIL line per criterion and exits non-zero if any fails.
//!
//! Seeds are fixed here once and never tuned to make a criterion pass.

use std::path::Path;
use std::time::{Duration, Instant};

use mgig_core::diagnostics::{chain_summary, gig_moment_oracle, mean_and_se, ChainSummary};
use mgig_core::linalg::{column_offset, packed_len, riccati_residual, solve_riccati, Spd, UnitCholesky};
use mgig_core::mgig::{
    cond_a_params, cond_b_params, log_density_ab, sample_chain, DegenerateMgigParams, MatsumotoYorSampler, MgigParams,
    SamplerKind,
};
use mgig_core::random::{standard_normal_matrix, GigParams, RngStream};
use mgig_lab::config::{AarConfig, BenchmarkConfig, MstConfig, PggmConfig, SamplerName, Scenario, SchemeName};
use mgig_lab::mst::MstModel;
use mgig_lab::{Command, Config};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn config(command: Command) -> Config {
    let mut c = Config::from_toml("").unwrap();
    c.command = Some(command);
    c.seed = SEED;
    c
}

fn random_spd(p: usize, rng: &mut RngStream) -> Spd<f64> {
    let a = standard_normal_matrix(p, p, rng);
    Spd::new(&a * a.transpose() / p as f64 + DMatrix::identity(p, p) * 0.3).unwrap()
}

fn c1_slice_constancy() -> Outcome {
    let mut rng = RngStream::new(SEED, 101);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let p = 2 + k % 3;
        let params = MgigParams::new(rng.random_range(-3.0..3.0), random_spd(p, &mut rng), random_spd(p, &mut rng)).unwrap();
        let a0: Vec<f64> = (0..p).map(|_| rng.random_range(0.5..2.0)).collect();
        let b0: Vec<f64> = (0..packed_len(p)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let gigs = cond_a_params(&b0, &params).unwrap();
        let mut diffs = Vec::new();
        for _ in 0..5 {
            let a: Vec<f64> = (0..p).map(|_| rng.random_range(0.2..3.0)).collect();
            let f = UnitCholesky::new(a.clone(), b0.clone()).unwrap();
            let kernel: f64 = gigs.iter().zip(&a).map(|(g, x)| g.ln_kernel(*x)).sum();
            diffs.push(log_density_ab(&f, &params).unwrap() - kernel);
        }
        worst = diffs.iter().fold(worst, |w, d| w.max((d - diffs[0]).abs()));
        for i in 1..p {
            let cond = cond_b_params(i, &a0, &b0, &params).unwrap();
            let off = column_offset(p, i - 1);
            let mut diffs = Vec::new();
            for _ in 0..5 {
                let mut b = b0.clone();
                let block: Vec<f64> = (0..p - i).map(|_| rng.random_range(-1.5..1.5)).collect();
                b[off..off + p - i].copy_from_slice(&block);
                let f = UnitCholesky::new(a0.clone(), b).unwrap();
                diffs.push(log_density_ab(&f, &params).unwrap() - cond.ln_pdf(&DVector::from_vec(block)).unwrap());
            }
            worst = diffs.iter().fold(worst, |w, d| w.max((d - diffs[0]).abs()));
        }
    }
    outcome(worst < 1e-8, format!("max slice deviation {worst:.2e} over 100 instances"))
}

fn c2_scalar_oracle() -> Outcome {
    let two = Spd::from_diagonal(&[2.0]).unwrap();
    let params = MgigParams::new(2.0, two.clone(), two).unwrap();
    let chain = sample_chain(&params, SamplerKind::Gs, 55_000, 5000, 1, &mut RngStream::new(SEED, 102), None).unwrap();
    let x = chain.entry_series(0, 0);
    let x2: Vec<f64> = x.iter().map(|v| v * v).collect();
    let g = GigParams::new(3.0, 2.0, 2.0).unwrap();
    let (m1, s1) = mean_and_se(&x);
    let (m2, s2) = mean_and_se(&x2);
    let (o1, o2) = (gig_moment_oracle(&g, 1).unwrap(), gig_moment_oracle(&g, 2).unwrap());
    let (z1, z2) = ((m1 - o1) / s1, (m2 - o2) / s2);
    outcome(
        z1.abs() < 4.0 && z2.abs() < 4.0,
        format!("E[X] {m1:.4} vs {o1:.4} (z={z1:.2}), E[X²] {m2:.4} vs {o2:.4} (z={z2:.2})"),
    )
}

fn c3_cross_sampler() -> Outcome {
    let params = MgigParams::new(5.0, Spd::identity(3), Spd::identity(3)).unwrap();
    let kinds = [SamplerKind::Gs, SamplerKind::Mh1, SamplerKind::Mh2 { rho: 5.0 }, SamplerKind::Hr];
    let sums: Vec<ChainSummary> = kinds
        .iter()
        .enumerate()
        .map(|(k, &kind)| {
            let mut rng = RngStream::new(SEED, 103).derive(k as u64);
            chain_summary(&sample_chain(&params, kind, 55_000, 5000, 1, &mut rng, None).unwrap()).unwrap()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in a + 1..4 {
            for i in 0..3 {
                for j in i..3 {
                    let (x, y) = (&sums[a], &sums[b]);
                    let z = (x.mean[(i, j)] - y.mean[(i, j)]).abs() / x.std_errors[(i, j)].hypot(y.std_errors[(i, j)]);
                    let zi = (x.mean_inverse[(i, j)] - y.mean_inverse[(i, j)]).abs()
                        / x.inverse_std_errors[(i, j)].hypot(y.inverse_std_errors[(i, j)]);
                    worst = worst.max(z).max(zi);
                }
            }
        }
    }
    outcome(worst < 4.0, format!("largest pairwise |z| over Σ and Σ⁻¹ entries: {worst:.2}"))
}

fn c4_riccati() -> Outcome {
    let mut rng = RngStream::new(SEED, 104);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let p = 1 + k % 10;
        let lambda = rng.random_range(-8.0..8.0);
        let psi = random_spd(p, &mut rng).scale(10f64.powf(rng.random_range(-2.0..2.0))).unwrap();
        let gamma = random_spd(p, &mut rng).scale(10f64.powf(rng.random_range(-2.0..2.0))).unwrap();
        let sol = solve_riccati(lambda, &psi, &gamma).unwrap();
        worst = worst.max(riccati_residual(lambda, &psi, &gamma, &sol) / gamma.as_matrix().amax());
    }
    let one = Spd::identity(1);
    let root = solve_riccati(1.0, &one, &one).unwrap().as_matrix()[(0, 0)];
    let root_err = (root - (1.0 + 2f64.sqrt())).abs();
    outcome(
        worst <= 1e-9 && root_err <= 1e-12,
        format!("max relative residual {worst:.2e}, scalar root error {root_err:.1e}"),
    )
}

fn c5_aar_limits() -> Outcome {
    let mut cfg = config(Command::Aar);
    cfg.aar = Some(AarConfig {
        dim: 2,
        lambda_grid: vec![50.0, -0.95],
        psi_grid: vec![1.0, 1e2, 1e4],
        psi_lambda: 2.0,
        n_pairs: 5000,
        gap: 10,
    });
    let (rows, _) = mgig_lab::aar::aar_rows(&cfg).unwrap();
    let est: Vec<_> = rows.iter().map(|r| r.estimate.expect("estimate")).collect();
    let a = est[0].value - 2.0 * est[0].mc_std_error > 0.9;
    let b = est[1].value + 2.0 * est[1].mc_std_error < 0.15;
    let c = est[2..]
        .windows(2)
        .all(|w| w[0].value - w[1].value > 2.0 * w[0].mc_std_error.hypot(w[1].mc_std_error));
    outcome(
        a && b && c,
        format!(
            "λ=50: {:.3}±{:.3}, λ=-0.95: {:.3}±{:.3}, ψ grid: {:.3}, {:.3}, {:.3}",
            est[0].value, est[0].mc_std_error, est[1].value, est[1].mc_std_error, est[2].value, est[3].value, est[4].value
        ),
    )
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn c6_benchmark() -> Outcome {
    let mut cfg = config(Command::Benchmark);
    cfg.replicates = 5;
    cfg.benchmark = Some(BenchmarkConfig {
        dims: vec![5, 10, 20],
        lambda: 2.0,
        scenarios: vec![Scenario::I, Scenario::II, Scenario::III],
        samplers: vec![SamplerName::GS, SamplerName::MH1, SamplerName::MH2, SamplerName::HR],
        n_iter: 5000,
        burn_in: 500,
        thin: 1,
        rho: 5.0,
    });
    let (rows, _) = mgig_lab::benchmark::benchmark_rows(&cfg).unwrap();
    let failed = rows.iter().filter(|r| r.status.starts_with("error")).count();
    let sel = |s: SamplerName, p: usize, f: fn(&mgig_lab::benchmark::ResultRow) -> f64| -> Vec<f64> {
        rows.iter().filter(|r| r.sampler == s && r.p == p && r.scenario == "III").map(f).collect()
    };
    let ess = |s| median(sel(s, 20, |r| r.mean_ess));
    let (gs, mh1, hr) = (ess(SamplerName::GS), ess(SamplerName::MH1), ess(SamplerName::HR));
    let acc: Vec<f64> = [5, 10, 20]
        .iter()
        .map(|&p| {
            let v = sel(SamplerName::MH1, p, |r| r.acceptance_rate);
            v.iter().sum::<f64>() / v.len() as f64
        })
        .collect();
    let decreasing = acc.windows(2).all(|w| w[1] < w[0]);
    outcome(
        failed == 0 && gs >= mh1 && gs >= hr && decreasing,
        format!(
            "scenario III p=20 median mean-ESS GS {gs:.0}, MH1 {mh1:.0}, HR {hr:.0}; MH1 acceptance {:.3}, {:.3}, {:.3}; {failed} failed cells",
            acc[0], acc[1], acc[2]
        ),
    )
}

fn c7_matsumoto_yor() -> Outcome {
    let psi_inv = Spd::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])).unwrap();
    let theta = DMatrix::from_column_slice(2, 1, &[1.0, 0.5]);
    let d = DegenerateMgigParams::new(2.0, psi_inv.inverse().unwrap(), theta).unwrap();
    let n = 50_000;
    let mut my = MatsumotoYorSampler::new(&d, SamplerKind::Gs, 1).unwrap();
    let mut rng = RngStream::new(SEED, 107);
    let mut composed = DMatrix::zeros(2, 2);
    for _ in 0..n {
        composed += my.sample(&mut rng).unwrap().as_matrix();
    }
    composed /= n as f64;
    let gamma = Spd::new(d.gamma() + DMatrix::identity(2, 2) * 1e-6).unwrap();
    let reg = MgigParams::new(2.0, d.psi.clone(), gamma).unwrap();
    let gs = sample_chain(&reg, SamplerKind::Gs, n + 5000, 5000, 1, &mut RngStream::new(SEED, 207), None)
        .unwrap()
        .mean()
        .unwrap();
    let worst = composed.iter().zip(gs.iter()).map(|(a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
    outcome(worst < 0.05, format!("max relative entry gap {:.2}%", 100.0 * worst))
}

fn c8_pggm() -> Outcome {
    let mut cfg = config(Command::PggmSim);
    cfg.replicates = 5;
    cfg.pggm = Some(PggmConfig {
        n: 100,
        p: 10,
        q: 3,
        schemes: vec![SchemeName::GS, SchemeName::MI],
        gs_scans: 1,
        n_iter: 5000,
        burn_in: 500,
        mse_every: 500,
        traces: false,
    });
    let (rows, _, _) = mgig_lab::pggm::pggm_rows(&cfg).unwrap();
    let mse = |s: SchemeName| -> Vec<f64> { rows.iter().filter(|r| r.scheme == s).map(|r| r.mse_omega).collect() };
    let (gs, mi) = (mse(SchemeName::GS), mse(SchemeName::MI));
    let wins = gs.iter().zip(&mi).filter(|(g, m)| g < m).count();
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ");
    outcome(wins >= 4, format!("GS < MI in {wins}/5 (GS: {}; MI: {})", fmt(&gs), fmt(&mi)))
}

fn c9_mst() -> Outcome {
    let base = MstConfig {
        n: 50,
        p: 2,
        q: 2,
        nus: vec![10.0],
        m: vec![vec![1.0, -1.0], vec![0.5, 2.0]],
        b: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        w_sampler: SamplerName::GS,
        n_iter: 3000,
        burn_in: 500,
    };
    let mut null = config(Command::MstSim);
    null.mst = Some(base.clone());
    let (rows, _, _) = mgig_lab::mst::mst_rows(&null).unwrap();
    let (mean, sd) = rows.iter().find(|r| r.model == MstModel::Mst).unwrap().b_moments.clone().unwrap();
    let worst_z = mean.iter().zip(sd.iter()).map(|(m, s)| (m / s).abs()).fold(0.0, f64::max);

    let mut big = config(Command::MstSim);
    big.replicates = 10;
    big.mst = Some(MstConfig {
        b: vec![vec![8.0, -6.0], vec![5.0, 7.0]],
        ..base
    });
    let (rows, _, _) = mgig_lab::mst::mst_rows(&big).unwrap();
    let loss = |m: MstModel| -> Vec<f64> { rows.iter().filter(|r| r.model == m).map(|r| r.loss).collect() };
    let wins = loss(MstModel::Mst).iter().zip(loss(MstModel::Mt)).filter(|(a, b)| **a < *b).count();
    outcome(
        worst_z < 4.0 && wins >= 8,
        format!("null B max |mean/sd| {worst_z:.2}; MST loss below MT in {wins}/10"),
    )
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c10_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut small = vec![];
    let mut b = config(Command::Benchmark);
    b.replicates = 2;
    b.benchmark = Some(BenchmarkConfig {
        dims: vec![3, 5],
        n_iter: 600,
        burn_in: 100,
        ..Default::default()
    });
    small.push(b);
    let mut a = config(Command::Aar);
    a.aar = Some(AarConfig {
        n_pairs: 500,
        ..Default::default()
    });
    small.push(a);
    let mut g = config(Command::PggmSim);
    g.replicates = 2;
    g.pggm = Some(PggmConfig {
        n_iter: 400,
        burn_in: 100,
        ..Default::default()
    });
    small.push(g);
    let mut m = config(Command::MstSim);
    m.replicates = 2;
    m.mst = Some(MstConfig {
        n_iter: 300,
        burn_in: 100,
        ..Default::default()
    });
    small.push(m);
    let mut mismatched = Vec::new();
    let mut n_files = 0;
    for (k, cfg) in small.into_iter().enumerate() {
        let runs: Vec<_> = (0..2)
            .map(|r| {
                let mut c = cfg.clone();
                c.record_timing = false;
                c.output_dir = tmp.path().join(format!("{k}-{r}"));
                mgig_lab::run(&c).unwrap();
                outputs(&c.output_dir)
            })
            .collect();
        n_files += runs[0].len();
        if runs[0] != runs[1] {
            mismatched.push(cfg.command.unwrap().name());
        }
    }
    outcome(
        mismatched.is_empty(),
        format!("{n_files} output files compared across 4 commands; mismatches: {mismatched:?}"),
    )
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "conditional slice constancy", Duration::from_secs(10), c1_slice_constancy),
        (2, "p=1 Bessel oracle", Duration::from_secs(5), c2_scalar_oracle),
        (3, "cross-sampler agreement", Duration::from_secs(120), c3_cross_sampler),
        (4, "Riccati residual", Duration::from_secs(60), c4_riccati),
        (5, "AAR limits", Duration::from_secs(60), c5_aar_limits),
        (6, "benchmark ordering", Duration::from_secs(600), c6_benchmark),
        (7, "Matsumoto-Yor composition", Duration::from_secs(60), c7_matsumoto_yor),
        (8, "PGGM GS vs MI", Duration::from_secs(600), c8_pggm),
        (9, "MST self-consistency", Duration::from_secs(600), c9_mst),
        (10, "byte-identical reruns", Duration::from_secs(600), c10_determinism),
    ];
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {}: {name}: {} [{:.1}s of {}s{}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs(),
            if in_time { "" } else { ", over time" }
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
