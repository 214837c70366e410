use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use mgig_lab::{run, Command, Config, Result};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Benchmark,
    Aar,
    PggmSim,
    MstSim,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Benchmark => Command::Benchmark,
            Cmd::Aar => Command::Aar,
            Cmd::PggmSim => Command::PggmSim,
            Cmd::MstSim => Command::MstSim,
        }
    }
}

/// Runs MGIG sampler experiments from a TOML config. Flags override the
/// corresponding config values.
#[derive(Debug, Parser)]
#[command(name = "mgig-lab", version)]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    threads: Option<usize>,
}

fn execute(args: Args) -> Result<()> {
    let mut cfg = Config::load(&args.config)?;
    cfg.set_command(args.command.into())?;
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.threads.is_some() {
        cfg.threads = args.threads;
    }
    let report = run(&cfg)?;
    for f in &report.files {
        eprintln!("wrote {}", f.display());
    }
    if report.n_failed > 0 {
        eprintln!("{} of {} cells failed", report.n_failed, report.n_cells);
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mgig-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
