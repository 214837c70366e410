//! TOML experiment configuration.
//!
//! Precedence: command-line flags, then file values, then the defaults
//! below. Every table rejects unknown keys.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mgig_core::linalg::Spd;
use mgig_core::mgig::SamplerKind;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Benchmark,
    Aar,
    PggmSim,
    MstSim,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Benchmark => "benchmark",
            Command::Aar => "aar",
            Command::PggmSim => "pggm-sim",
            Command::MstSim => "mst-sim",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// May be omitted when the command is given on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// `false` writes `NA` in timing columns so that reruns are byte-identical.
    #[serde(default = "default_true")]
    pub record_timing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<BenchmarkConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aar: Option<AarConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pggm: Option<PggmConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mst: Option<MstConfig>,
}

fn default_seed() -> u64 {
    1
}
fn default_replicates() -> usize {
    1
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_true() -> bool {
    true
}

/// `Ψ` of the benchmark target; `Γ = I` except for `custom`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    /// `Ψ = I`
    I,
    /// `Ψ = diag(1, …, 1, 10, 50)`
    II,
    /// `Ψ = diag(1, …, p)`
    III,
    /// Diagonals of `Ψ` and `Γ`.
    #[serde(rename = "custom")]
    Custom { psi: Vec<f64>, gamma: Vec<f64> },
}

impl Scenario {
    pub fn label(&self) -> &'static str {
        match self {
            Scenario::I => "I",
            Scenario::II => "II",
            Scenario::III => "III",
            Scenario::Custom { .. } => "custom",
        }
    }

    pub fn psi_gamma(&self, p: usize) -> Result<(Spd<f64>, Spd<f64>)> {
        let (psi, gamma) = match self {
            Scenario::I => (vec![1.0; p], vec![1.0; p]),
            Scenario::II => {
                if p < 2 {
                    return Err(CliError::Config("scenario II needs p >= 2".into()));
                }
                let mut d = vec![1.0; p];
                d[p - 2] = 10.0;
                d[p - 1] = 50.0;
                (d, vec![1.0; p])
            }
            Scenario::III => ((1..=p).map(|i| i as f64).collect(), vec![1.0; p]),
            Scenario::Custom { psi, gamma } => {
                if psi.len() != p || gamma.len() != p {
                    return Err(CliError::Config(format!(
                        "custom scenario diagonals have lengths {} and {}, dims asks for {p}",
                        psi.len(),
                        gamma.len()
                    )));
                }
                (psi.clone(), gamma.clone())
            }
        };
        let diag = |d: &[f64]| {
            Spd::from_diagonal(d).map_err(|_| CliError::Config(format!("scenario diagonal {d:?} is not positive")))
        };
        Ok((diag(&psi)?, diag(&gamma)?))
    }
}

/// Sampler names as written in configs: `GS`, `MH1`, `MH2`, `HR`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplerName {
    GS,
    MH1,
    MH2,
    HR,
}

impl SamplerName {
    pub fn kind(&self, rho: f64) -> SamplerKind {
        match self {
            SamplerName::GS => SamplerKind::Gs,
            SamplerName::MH1 => SamplerKind::Mh1,
            SamplerName::MH2 => SamplerKind::Mh2 { rho },
            SamplerName::HR => SamplerKind::Hr,
        }
    }
}

impl fmt::Display for SamplerName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkConfig {
    pub dims: Vec<usize>,
    pub lambda: f64,
    pub scenarios: Vec<Scenario>,
    pub samplers: Vec<SamplerName>,
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// MH2 tuning constant.
    pub rho: f64,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            dims: vec![5, 10, 20],
            lambda: 2.0,
            scenarios: vec![Scenario::I, Scenario::II, Scenario::III],
            samplers: vec![SamplerName::GS, SamplerName::MH1, SamplerName::MH2, SamplerName::HR],
            n_iter: 5000,
            burn_in: 500,
            thin: 1,
            rho: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AarConfig {
    pub dim: usize,
    /// Orders for `Ψ = Γ = I`.
    pub lambda_grid: Vec<f64>,
    /// `ψ` values for `Ψ = diag(ψ, 1, …, 1)`, `Γ = I` at order `psi_lambda`.
    pub psi_grid: Vec<f64>,
    pub psi_lambda: f64,
    pub n_pairs: usize,
    pub gap: usize,
}

impl Default for AarConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            lambda_grid: vec![-0.9, 0.0, 2.0, 10.0, 50.0],
            psi_grid: vec![1.0, 1e2, 1e4],
            psi_lambda: 2.0,
            n_pairs: 5000,
            gap: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeName {
    GS,
    MH1,
    HR,
    MI,
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PggmConfig {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub schemes: Vec<SchemeName>,
    /// Gibbs scans per `Ω` update under `GS`.
    pub gs_scans: usize,
    pub n_iter: usize,
    pub burn_in: usize,
    /// Spacing of the running-MSE checkpoints.
    pub mse_every: usize,
    /// Trace files for the first replicate.
    pub traces: bool,
}

impl Default for PggmConfig {
    fn default() -> Self {
        Self {
            n: 100,
            p: 10,
            q: 3,
            schemes: vec![SchemeName::GS, SchemeName::MH1, SchemeName::HR, SchemeName::MI],
            gs_scans: 1,
            n_iter: 5000,
            burn_in: 500,
            mse_every: 100,
            traces: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MstConfig {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub nus: Vec<f64>,
    /// True `M` and `B`, by rows.
    pub m: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub w_sampler: SamplerName,
    pub n_iter: usize,
    pub burn_in: usize,
}

impl Default for MstConfig {
    fn default() -> Self {
        Self {
            n: 50,
            p: 2,
            q: 2,
            nus: vec![5.0, 10.0],
            m: vec![vec![1.0, -1.0], vec![0.5, 2.0]],
            b: vec![vec![8.0, -6.0], vec![5.0, 7.0]],
            w_sampler: SamplerName::GS,
            n_iter: 3000,
            burn_in: 500,
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn check_iters(section: &str, n_iter: usize, burn_in: usize) -> Result<()> {
    check(n_iter > burn_in, || format!("{section}: n_iter ({n_iter}) must exceed burn_in ({burn_in})"))
}

pub(crate) fn rows_to_matrix(name: &str, rows: &[Vec<f64>], r: usize, c: usize) -> Result<nalgebra::DMatrix<f64>> {
    check(rows.len() == r && rows.iter().all(|row| row.len() == c), || {
        format!("mst.{name} must be {r} rows of {c} values")
    })?;
    Ok(nalgebra::DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reconciles the file's command with the one given on the command line.
    pub fn set_command(&mut self, cli: Command) -> Result<()> {
        match self.command {
            Some(c) if c != cli => Err(CliError::Config(format!("config is for `{c}` but `{cli}` was requested"))),
            _ => {
                self.command = Some(cli);
                Ok(())
            }
        }
    }

    pub fn command(&self) -> Result<Command> {
        self.command.ok_or_else(|| CliError::Config("no command given".into()))
    }

    pub fn benchmark(&self) -> BenchmarkConfig {
        self.benchmark.clone().unwrap_or_default()
    }

    pub fn aar(&self) -> AarConfig {
        self.aar.clone().unwrap_or_default()
    }

    pub fn pggm(&self) -> PggmConfig {
        self.pggm.clone().unwrap_or_default()
    }

    pub fn mst(&self) -> MstConfig {
        self.mst.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let command = self.command()?;
        check(self.replicates >= 1, || "replicates must be at least 1".into())?;
        if let Some(t) = self.threads {
            check(t >= 1, || "threads must be at least 1".into())?;
        }
        let stray = [
            ("benchmark", self.benchmark.is_some(), Command::Benchmark),
            ("aar", self.aar.is_some(), Command::Aar),
            ("pggm", self.pggm.is_some(), Command::PggmSim),
            ("mst", self.mst.is_some(), Command::MstSim),
        ];
        for (name, present, owner) in stray {
            check(!present || owner == command, || format!("[{name}] table given for command `{command}`"))?;
        }
        match command {
            Command::Benchmark => {
                let b = self.benchmark();
                check(!b.dims.is_empty(), || "benchmark.dims is empty".into())?;
                check(b.dims.iter().all(|&p| p >= 1), || "benchmark.dims entries must be positive".into())?;
                check(!b.scenarios.is_empty(), || "benchmark.scenarios is empty".into())?;
                check(!b.samplers.is_empty(), || "benchmark.samplers is empty".into())?;
                check(b.thin >= 1, || "benchmark.thin must be at least 1".into())?;
                check_iters("benchmark", b.n_iter, b.burn_in)?;
                check(b.n_iter - b.burn_in >= 10 * b.thin, || {
                    "benchmark: fewer than 10 retained draws, ESS is undefined".into()
                })?;
                check(b.lambda.is_finite(), || "benchmark.lambda must be finite".into())?;
                for s in &b.samplers {
                    s.kind(b.rho).check(b.lambda).map_err(|e| CliError::Config(format!("benchmark.samplers: {e}")))?;
                }
                for &p in &b.dims {
                    for s in &b.scenarios {
                        s.psi_gamma(p)?;
                    }
                }
            }
            Command::Aar => {
                let a = self.aar();
                check(a.dim >= 1, || "aar.dim must be positive".into())?;
                check(!a.lambda_grid.is_empty(), || "aar.lambda_grid is empty".into())?;
                check(!a.psi_grid.is_empty(), || "aar.psi_grid is empty".into())?;
                for &l in a.lambda_grid.iter().chain([a.psi_lambda].iter()) {
                    check(l > -1.0, || format!("aar: order {l} must exceed -1"))?;
                }
                check(a.psi_grid.iter().all(|&v| v > 0.0 && v.is_finite()), || {
                    "aar.psi_grid entries must be positive".into()
                })?;
                check(a.n_pairs >= 100, || "aar.n_pairs must be at least 100".into())?;
                check(a.gap >= 1, || "aar.gap must be at least 1".into())?;
            }
            Command::PggmSim => {
                let g = self.pggm();
                check(g.q >= 1 && g.p >= 1, || "pggm: p and q must be positive".into())?;
                check(g.n > g.q, || "pggm: n must exceed q".into())?;
                check(!g.schemes.is_empty(), || "pggm.schemes is empty".into())?;
                check(g.gs_scans >= 1, || "pggm.gs_scans must be at least 1".into())?;
                check(g.mse_every >= 1, || "pggm.mse_every must be at least 1".into())?;
                check_iters("pggm", g.n_iter, g.burn_in)?;
                check(g.n_iter - g.burn_in >= 10, || "pggm: fewer than 10 retained draws".into())?;
            }
            Command::MstSim => {
                let m = self.mst();
                check(m.p >= 1 && m.q >= 1 && m.n >= 1, || "mst: n, p and q must be positive".into())?;
                check(!m.nus.is_empty(), || "mst.nus is empty".into())?;
                for &nu in &m.nus {
                    check(nu > m.p as f64 - 1.0, || format!("mst: nu = {nu} must exceed p - 1"))?;
                    // The latent kernels other than GS need the conditional order above −1.
                    let order = (nu + m.q as f64 - m.p as f64 - 1.0) / 2.0;
                    m.w_sampler
                        .kind(5.0)
                        .check(order)
                        .map_err(|e| CliError::Config(format!("mst.w_sampler: {e}")))?;
                }
                rows_to_matrix("m", &m.m, m.p, m.q)?;
                rows_to_matrix("b", &m.b, m.p, m.q)?;
                check_iters("mst", m.n_iter, m.burn_in)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Config {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_toml(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
command = "benchmark"
seed = 7
replicates = 2
output_dir = "runs/a"
record_timing = false

[benchmark]
dims = [3, 5]
lambda = 2.0
scenarios = ["I", "III", { custom = { psi = [1.0, 2.0, 3.0], gamma = [1.0, 1.0, 1.0] } }]
samplers = ["GS", "HR"]
n_iter = 300
burn_in = 50
"#;

    #[test]
    fn roundtrip() {
        let c = Config::from_toml(FULL).unwrap();
        let back = Config::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn unknown_key_rejected_with_location() {
        let err = Config::from_toml("command = \"aar\"\nsed = 3\n").unwrap_err().to_string();
        assert!(err.contains("sed") && err.contains("line 2"), "{err}");
        let err = Config::from_toml("[aar]\nlambdas = [1.0]\n").unwrap_err().to_string();
        assert!(err.contains("lambdas"), "{err}");
    }

    #[test]
    fn scenario_two() {
        let (psi, gamma) = Scenario::II.psi_gamma(5).unwrap();
        assert_eq!(psi.as_matrix().diagonal().as_slice(), &[1.0, 1.0, 1.0, 10.0, 50.0]);
        assert_eq!(gamma.as_matrix(), Spd::<f64>::identity(5).as_matrix());
    }

    #[test]
    fn custom_dimension_checked() {
        let mut c = Config::from_toml(FULL).unwrap();
        // dims contains 5, the custom diagonals have length 3
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
        c.benchmark.as_mut().unwrap().dims = vec![3];
        c.validate().unwrap();
    }

    #[test]
    fn validation_errors() {
        let base = |extra: &str| Config::from_toml(&format!("command = \"aar\"\n{extra}")).unwrap();
        base("").validate().unwrap();
        assert!(base("replicates = 0").validate().is_err());
        assert!(base("[aar]\nlambda_grid = []").validate().is_err());
        assert!(base("[aar]\nlambda_grid = [-1.0]").validate().is_err());
        assert!(base("[pggm]\nn = 10").validate().is_err());
        let mh_low = Config::from_toml("command = \"benchmark\"\n[benchmark]\nlambda = -1.5\nsamplers = [\"MH1\"]").unwrap();
        assert!(mh_low.validate().is_err());
    }

    #[test]
    fn command_reconciliation() {
        let mut c = Config::from_toml("seed = 3").unwrap();
        assert!(c.validate().is_err());
        c.set_command(Command::MstSim).unwrap();
        c.validate().unwrap();
        assert!(c.set_command(Command::Aar).is_err());
    }
}
