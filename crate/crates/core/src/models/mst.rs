//! Matrix skew-t model: an inverse-Wishart mean-variance mixture of matrix
//! normals,
//!
//! ```text
//! Y_i | W_i ∼ N_{p,q}(M + W_i B, W_i, Ω),   W_i ∼ IW_p(Ψ, ν),
//! ```
//!
//! with `ψ₁₁ = 1`. Given the rest, `W_i⁻¹ ∼ MGIG_p((ν+q−p−1)/2, Ψ + E_iΩ⁻¹E_iᵀ, BΩ⁻¹Bᵀ)`
//! where `E_i = Y_i − M`. Vectorization is column-major throughout, so
//! `vec(U X V) = (Vᵀ ⊗ U) vec(X)`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{psd_factor, psd_rank, trace_product, Spd, UnitCholesky};
use crate::mgig::{
    gibbs_step_in_place, DegenerateMgigParams, HrKernel, MatsumotoYorSampler, Mh1Kernel, MgigParams, MhState,
    SamplerKind,
};
use crate::random::{sample_mvn_precision, standard_normal_matrix, InverseWishartParams, MvnPrecisionParams, WishartParams};

const RANK_TOL: f64 = 1e-10;
const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct MstData {
    pub y: Vec<DMatrix<f64>>,
    pub p: usize,
    pub q: usize,
}

impl MstData {
    pub fn new(y: Vec<DMatrix<f64>>, p: usize, q: usize) -> Result<Self> {
        if let Some(bad) = y.iter().find(|m| m.nrows() != p || m.ncols() != q) {
            return Err(Error::DimMismatch {
                expected: p * q,
                found: bad.len(),
            });
        }
        Ok(Self { y, p, q })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

#[derive(Debug, Clone)]
pub struct MstState {
    pub m: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub psi: Spd<f64>,
    pub omega: Spd<f64>,
    pub w: Vec<Spd<f64>>,
}

impl MstState {
    /// `M` at the sample mean, `B = 0`, `Ψ = Ω = I`, `W_i = I`.
    pub fn initial(data: &MstData) -> Self {
        let (p, q) = (data.p, data.q);
        let m = if data.n() == 0 {
            DMatrix::zeros(p, q)
        } else {
            data.y.iter().fold(DMatrix::zeros(p, q), |acc, y| acc + y) / data.n() as f64
        };
        Self {
            m,
            b: DMatrix::zeros(p, q),
            psi: Spd::identity(p),
            omega: Spd::identity(q),
            w: vec![Spd::identity(p); data.n()],
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixNormalPrior {
    pub mean: DMatrix<f64>,
    /// Row covariance, `p × p`.
    pub u: Spd<f64>,
    /// Column covariance, `q × q`.
    pub v: Spd<f64>,
}

impl MatrixNormalPrior {
    fn precision(&self) -> Result<(DMatrix<f64>, DVector<f64>)> {
        let ui = self.u.inverse()?;
        let vi = self.v.inverse()?;
        let prec = vi.as_matrix().kronecker(ui.as_matrix());
        let lin = ui.as_matrix() * &self.mean * vi.as_matrix();
        Ok((prec, vec_of(&lin)))
    }

    fn ln_kernel(&self, x: &DMatrix<f64>) -> Result<f64> {
        let d = x - &self.mean;
        let ui = self.u.inverse()?;
        let vi = self.v.inverse()?;
        Ok(-0.5 * trace_product(vi.as_matrix(), &(d.transpose() * ui.as_matrix() * &d)))
    }
}

#[derive(Debug, Clone)]
pub struct MstHyper {
    pub nu: f64,
    pub m_prior: MatrixNormalPrior,
    pub b_prior: MatrixNormalPrior,
    /// `Ψ ∼ W_p(Ψ₀, η₀)` (scale, dof).
    pub psi0: Spd<f64>,
    pub eta0: f64,
    /// `Ω ∼ IW_q(Ω₀, ξ₀)`.
    pub omega0: Spd<f64>,
    pub xi0: f64,
}

impl MstHyper {
    /// Zero-mean matrix normals with row variance 100, `Ψ₀ = I`, `η₀ = p+2`,
    /// `Ω₀ = I`, `ξ₀ = q+2`.
    pub fn weak(p: usize, q: usize, nu: f64) -> Self {
        let mn = || MatrixNormalPrior {
            mean: DMatrix::zeros(p, q),
            u: Spd::from_diagonal(&vec![100.0; p]).expect("positive"),
            v: Spd::identity(q),
        };
        Self {
            nu,
            m_prior: mn(),
            b_prior: mn(),
            psi0: Spd::identity(p),
            eta0: p as f64 + 2.0,
            omega0: Spd::identity(q),
            xi0: q as f64 + 2.0,
        }
    }

    pub fn validate(&self, p: usize, q: usize) -> Result<()> {
        if !(self.nu > p as f64 - 1.0) {
            return Err(Error::InvalidDof { dof: self.nu, dim: p });
        }
        if !(self.eta0 > p as f64 - 1.0) {
            return Err(Error::InvalidDof { dof: self.eta0, dim: p });
        }
        if !(self.xi0 > q as f64 - 1.0) {
            return Err(Error::InvalidDof { dof: self.xi0, dim: q });
        }
        for (got, want) in [
            (self.psi0.dim(), p),
            (self.omega0.dim(), q),
            (self.m_prior.u.dim(), p),
            (self.m_prior.v.dim(), q),
            (self.b_prior.u.dim(), p),
            (self.b_prior.v.dim(), q),
        ] {
            if got != want {
                return Err(Error::DimMismatch {
                    expected: want,
                    found: got,
                });
            }
        }
        Ok(())
    }
}

fn vec_of(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Full conditional of one latent `W_i`.
#[derive(Debug, Clone)]
pub enum WConditional {
    /// Law of `W_i⁻¹`.
    Mgig(MgigParams),
    /// Law of `W_i⁻¹` with singular `BΩ⁻¹Bᵀ`.
    Degenerate(DegenerateMgigParams),
    /// `BΩ⁻¹Bᵀ = 0`: law of `W_i` is `IW(Ψ + E_iΩ⁻¹E_iᵀ, ν+q)`.
    InverseWishart(InverseWishartParams),
}

impl WConditional {
    pub fn is_degenerate(&self) -> bool {
        !matches!(self, WConditional::Mgig(_))
    }
}

#[derive(Debug, Clone)]
pub struct MstConditionals {
    pub w: Vec<WConditional>,
    pub m: MvnPrecisionParams,
    pub b: MvnPrecisionParams,
    pub psi: WishartParams,
    pub omega: InverseWishartParams,
}

pub fn w_conditional(i: usize, state: &MstState, data: &MstData, hyper: &MstHyper) -> Result<WConditional> {
    let (p, q) = (data.p as f64, data.q as f64);
    let omega_inv = state.omega.inverse()?;
    let e = &data.y[i] - &state.m;
    let gt = Spd::new_unchecked(state.psi.as_matrix() + &e * omega_inv.as_matrix() * e.transpose());
    let phi = &state.b * omega_inv.as_matrix() * state.b.transpose();
    let phi = (&phi + phi.transpose()) * 0.5;
    let lambda = (hyper.nu + q - p - 1.0) / 2.0;
    let rank = psd_rank(&phi, RANK_TOL);
    if rank == 0 {
        return Ok(WConditional::InverseWishart(InverseWishartParams::new(hyper.nu + q, gt)?));
    }
    if rank == data.p {
        if let Ok(g) = Spd::new(phi.clone()) {
            return Ok(WConditional::Mgig(MgigParams::new(lambda, gt, g)?));
        }
    }
    if lambda > -1.0 {
        if let Ok(d) = psd_factor(&phi, RANK_TOL).and_then(|t| DegenerateMgigParams::new(lambda, gt.clone(), t)) {
            return Ok(WConditional::Degenerate(d));
        }
    }
    let eps = RIDGE * gt.as_matrix().trace() / p;
    log::warn!("singular skewness scale at order {lambda}; adding {eps:e} I");
    let ridge = Spd::new_unchecked(phi + DMatrix::identity(data.p, data.p) * eps);
    Ok(WConditional::Mgig(MgigParams::new(lambda, gt, ridge)?))
}

/// `vec(M)`: precision `Ω⁻¹ ⊗ ΣW_i⁻¹ + V₀⁻¹ ⊗ U₀⁻¹`.
pub fn m_conditional(state: &MstState, data: &MstData, hyper: &MstHyper) -> Result<MvnPrecisionParams> {
    let (p, q) = (data.p, data.q);
    let omega_inv = state.omega.inverse()?;
    let (mut prec, mut lin) = hyper.m_prior.precision()?;
    let mut w_inv_sum = DMatrix::zeros(p, p);
    let mut lin_sum = DMatrix::zeros(p, q);
    for (y, w) in data.y.iter().zip(&state.w) {
        let wi = w.inverse()?;
        let r = y - w.as_matrix() * &state.b;
        lin_sum += wi.as_matrix() * r;
        w_inv_sum += wi.as_matrix();
    }
    prec += omega_inv.as_matrix().kronecker(&w_inv_sum);
    lin += vec_of(&(lin_sum * omega_inv.as_matrix()));
    MvnPrecisionParams::new(lin, Spd::new_unchecked(prec))
}

/// `vec(B)`: precision `Ω⁻¹ ⊗ ΣW_i + V₀⁻¹ ⊗ U₀⁻¹`.
pub fn b_conditional(state: &MstState, data: &MstData, hyper: &MstHyper) -> Result<MvnPrecisionParams> {
    let (p, q) = (data.p, data.q);
    let omega_inv = state.omega.inverse()?;
    let (mut prec, mut lin) = hyper.b_prior.precision()?;
    let mut w_sum = DMatrix::zeros(p, p);
    let mut e_sum = DMatrix::zeros(p, q);
    for (y, w) in data.y.iter().zip(&state.w) {
        e_sum += y - &state.m;
        w_sum += w.as_matrix();
    }
    prec += omega_inv.as_matrix().kronecker(&w_sum);
    lin += vec_of(&(e_sum * omega_inv.as_matrix()));
    MvnPrecisionParams::new(lin, Spd::new_unchecked(prec))
}

/// `Ψ ∼ W_p(η₀ + nν, (ΣW_i⁻¹ + Ψ₀⁻¹)⁻¹)`.
pub fn psi_conditional(state: &MstState, data: &MstData, hyper: &MstHyper) -> Result<WishartParams> {
    let mut s = hyper.psi0.inverse()?.into_inner();
    for w in &state.w {
        s += w.inverse()?.as_matrix();
    }
    let scale = Spd::new_unchecked(s).inverse()?;
    WishartParams::new(hyper.eta0 + data.n() as f64 * hyper.nu, scale)
}

/// `Ω ∼ IW_q(Ω₀ + ΣF_iᵀW_i⁻¹F_i, ξ₀ + np)` with `F_i = Y_i − M − W_iB`.
pub fn omega_conditional(state: &MstState, data: &MstData, hyper: &MstHyper) -> Result<InverseWishartParams> {
    let mut s = hyper.omega0.as_matrix().clone();
    for (y, w) in data.y.iter().zip(&state.w) {
        let f = y - &state.m - w.as_matrix() * &state.b;
        let wi = w.inverse()?;
        s += f.transpose() * wi.as_matrix() * f;
    }
    InverseWishartParams::new(hyper.xi0 + (data.n() * data.p) as f64, Spd::new_unchecked(s))
}

/// All full conditionals evaluated at one state.
pub fn mst_conditionals(state: &MstState, data: &MstData, hyper: &MstHyper) -> Result<MstConditionals> {
    if state.w.len() != data.n() {
        return Err(Error::DimMismatch {
            expected: data.n(),
            found: state.w.len(),
        });
    }
    Ok(MstConditionals {
        w: (0..data.n())
            .map(|i| w_conditional(i, state, data, hyper))
            .collect::<Result<_>>()?,
        m: m_conditional(state, data, hyper)?,
        b: b_conditional(state, data, hyper)?,
        psi: psi_conditional(state, data, hyper)?,
        omega: omega_conditional(state, data, hyper)?,
    })
}

/// Joint log-density of parameters, latents and data, up to a constant.
pub fn mst_log_joint(state: &MstState, data: &MstData, hyper: &MstHyper) -> Result<f64> {
    let (p, q) = (data.p as f64, data.q as f64);
    let omega_inv = state.omega.inverse()?;
    let ld_omega = state.omega.log_det()?;
    let ld_psi = state.psi.log_det()?;
    let mut out = 0.0;
    for (y, w) in data.y.iter().zip(&state.w) {
        let wi = w.inverse()?;
        let ld_w = w.log_det()?;
        let f = y - &state.m - w.as_matrix() * &state.b;
        out += -0.5 * q * ld_w - 0.5 * p * ld_omega
            - 0.5 * trace_product(omega_inv.as_matrix(), &(f.transpose() * wi.as_matrix() * &f));
        out += 0.5 * hyper.nu * ld_psi - 0.5 * (hyper.nu + p + 1.0) * ld_w
            - 0.5 * trace_product(state.psi.as_matrix(), wi.as_matrix());
    }
    out += hyper.m_prior.ln_kernel(&state.m)? + hyper.b_prior.ln_kernel(&state.b)?;
    out += 0.5 * (hyper.eta0 - p - 1.0) * ld_psi
        - 0.5 * trace_product(hyper.psi0.inverse()?.as_matrix(), state.psi.as_matrix());
    out += -0.5 * (hyper.xi0 + q + 1.0) * ld_omega - 0.5 * trace_product(hyper.omega0.as_matrix(), omega_inv.as_matrix());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MstOptions {
    /// Kernel for the latent `W_i` (one step per sweep).
    pub w_update: SamplerKind,
    /// `false` pins `B ≡ 0` (the matrix-t model).
    pub estimate_b: bool,
}

fn update_w<R: Rng + ?Sized>(current: &Spd<f64>, cond: &WConditional, kind: SamplerKind, rng: &mut R) -> Result<Spd<f64>> {
    match cond {
        WConditional::InverseWishart(iw) => iw.sample(rng),
        WConditional::Degenerate(d) => MatsumotoYorSampler::new(d, kind, 1)?.sample(rng)?.inverse(),
        WConditional::Mgig(params) => {
            let z = current.inverse()?;
            let z = match kind {
                SamplerKind::Gs => {
                    let mut f = UnitCholesky::from_spd(&z)?;
                    gibbs_step_in_place(&mut f, params, rng)?;
                    f.reconstruct()?
                }
                SamplerKind::Mh1 => {
                    let mut st = MhState::new(z)?;
                    Mh1Kernel::new(params)?.step(&mut st, rng)?;
                    st.sigma
                }
                SamplerKind::Mh2 { rho } => {
                    let mut st = MhState::new(z)?;
                    crate::mgig::Mh2Kernel::new(params, rho)?.step(&mut st, rng)?;
                    st.sigma
                }
                SamplerKind::Hr => {
                    let k = HrKernel::new(params);
                    let mut st = k.init(z);
                    k.step(&mut st, rng)?;
                    st.sigma
                }
            };
            z.inverse()
        }
    }
}

/// One sweep: each `W_i`, then `M`, `B`, `Ψ` (followed by the `ψ₁₁ = 1`
/// rescaling) and `Ω`.
///
/// The rescaling maps `(Ψ, W_i, B, Ω) → (Ψ/c, W_i/c, cB, cΩ)` with `c = ψ₁₁`,
/// which leaves the likelihood unchanged.
pub fn mst_gibbs_step<R: Rng + ?Sized>(
    state: &mut MstState,
    data: &MstData,
    hyper: &MstHyper,
    opts: MstOptions,
    rng: &mut R,
) -> Result<()> {
    let (p, q) = (data.p, data.q);
    for i in 0..data.n() {
        let cond = w_conditional(i, state, data, hyper)?;
        state.w[i] = update_w(&state.w[i], &cond, opts.w_update, rng)?;
    }
    let m = sample_mvn_precision(&m_conditional(state, data, hyper)?, rng)?;
    state.m = DMatrix::from_column_slice(p, q, m.as_slice());
    if opts.estimate_b {
        let b = sample_mvn_precision(&b_conditional(state, data, hyper)?, rng)?;
        state.b = DMatrix::from_column_slice(p, q, b.as_slice());
    }
    let psi = psi_conditional(state, data, hyper)?.sample(rng)?;
    let c = psi[(0, 0)];
    state.psi = psi.scale(1.0 / c)?;
    for w in state.w.iter_mut() {
        *w = w.scale(1.0 / c)?;
    }
    state.b *= c;
    state.omega = state.omega.scale(c)?;
    state.omega = omega_conditional(state, data, hyper)?.sample(rng)?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct MstChain {
    pub states: Vec<MstState>,
    pub wall_seconds: f64,
}

impl MstChain {
    /// Posterior mean and standard deviation of each entry of `B`.
    pub fn b_moments(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        entry_moments(self.states.iter().map(|s| &s.b))
    }

    pub fn m_moments(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        entry_moments(self.states.iter().map(|s| &s.m))
    }
}

fn entry_moments<'a>(draws: impl Iterator<Item = &'a DMatrix<f64>>) -> (DMatrix<f64>, DMatrix<f64>) {
    let draws: Vec<&DMatrix<f64>> = draws.collect();
    let n = draws.len() as f64;
    let (r, c) = draws[0].shape();
    let mean = draws.iter().fold(DMatrix::zeros(r, c), |acc, d| acc + *d) / n;
    let var = draws
        .iter()
        .fold(DMatrix::zeros(r, c), |acc, d| acc + (*d - &mean).map(|v| v * v))
        / (n - 1.0).max(1.0);
    (mean, var.map(f64::sqrt))
}

pub fn run_mst<R: Rng + ?Sized>(
    data: &MstData,
    hyper: &MstHyper,
    opts: MstOptions,
    n_iter: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<MstChain> {
    if n_iter <= burn_in {
        return Err(Error::InvalidParams(format!(
            "n_iter ({n_iter}) must exceed burn_in ({burn_in})"
        )));
    }
    hyper.validate(data.p, data.q)?;
    opts.w_update.check((hyper.nu + data.q as f64 - data.p as f64 - 1.0) / 2.0)?;
    let mut state = MstState::initial(data);
    for _ in 0..burn_in {
        mst_gibbs_step(&mut state, data, hyper, opts, rng)?;
    }
    let mut states = Vec::with_capacity(n_iter - burn_in);
    let start = Instant::now();
    for _ in burn_in..n_iter {
        mst_gibbs_step(&mut state, data, hyper, opts, rng)?;
        states.push(state.clone());
    }
    Ok(MstChain {
        states,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Forward simulation; also returns the latent `W_i`.
pub fn simulate_mst_latent<R: Rng + ?Sized>(
    m: &DMatrix<f64>,
    b: &DMatrix<f64>,
    psi: &Spd<f64>,
    omega: &Spd<f64>,
    nu: f64,
    n: usize,
    rng: &mut R,
) -> Result<(MstData, Vec<Spd<f64>>)> {
    let (p, q) = m.shape();
    if b.shape() != (p, q) || psi.dim() != p || omega.dim() != q {
        return Err(Error::DimMismatch {
            expected: p * q,
            found: b.len(),
        });
    }
    let iw = InverseWishartParams::new(nu, psi.clone())?;
    let lo = omega.cholesky()?.l();
    let mut ys = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for _ in 0..n {
        let w = iw.sample(rng)?;
        ys.push(draw_y(m, b, &w, &lo, rng)?);
        ws.push(w);
    }
    Ok((MstData::new(ys, p, q)?, ws))
}

pub fn simulate_mst<R: Rng + ?Sized>(
    m: &DMatrix<f64>,
    b: &DMatrix<f64>,
    psi: &Spd<f64>,
    omega: &Spd<f64>,
    nu: f64,
    n: usize,
    rng: &mut R,
) -> Result<MstData> {
    simulate_mst_latent(m, b, psi, omega, nu, n, rng).map(|(d, _)| d)
}

/// `M + WB + L_W Z L_Ωᵀ`.
fn draw_y<R: Rng + ?Sized>(
    m: &DMatrix<f64>,
    b: &DMatrix<f64>,
    w: &Spd<f64>,
    omega_chol: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DMatrix<f64>> {
    let (p, q) = m.shape();
    let lw = w.cholesky()?.l();
    let z = standard_normal_matrix(p, q, rng);
    Ok(m + w.as_matrix() * b + lw * z * omega_chol.transpose())
}

/// Gelfand-Ghosh posterior predictive loss with equal weights: for each
/// retained state one replicate `Y_i^rep ∼ N(M + W_iB, W_i, Ω)` per
/// observation, then `Σ_i ‖Y_i − E[Y_i^rep]‖² + Σ_i tr Var(vec Y_i^rep)`.
pub fn predictive_loss<R: Rng + ?Sized>(chain: &[MstState], data: &MstData, rng: &mut R) -> Result<f64> {
    if chain.is_empty() {
        return Err(Error::EmptyChain);
    }
    let (p, q, n) = (data.p, data.q, data.n());
    let mut mean = vec![DMatrix::<f64>::zeros(p, q); n];
    let mut m2 = vec![DMatrix::<f64>::zeros(p, q); n];
    for (t, s) in chain.iter().enumerate() {
        if s.w.len() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: s.w.len(),
            });
        }
        let lo = s.omega.cholesky()?.l();
        for i in 0..n {
            let y = draw_y(&s.m, &s.b, &s.w[i], &lo, rng)?;
            // Welford
            let delta = &y - &mean[i];
            mean[i] += &delta / (t + 1) as f64;
            m2[i] += delta.component_mul(&(&y - &mean[i]));
        }
    }
    let denom = (chain.len() as f64 - 1.0).max(1.0);
    let mut fit = 0.0;
    let mut penalty = 0.0;
    for i in 0..n {
        fit += (&data.y[i] - &mean[i]).norm_squared();
        penalty += m2[i].sum() / denom;
    }
    Ok(fit + penalty)
}
