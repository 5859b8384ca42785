//! `tdd`: time domain decomposition toolkit for the semi-discrete parabolic
//! optimal control optimality system.

mod commands;
mod config;
mod csv;
mod report;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "tdd",
    version,
    about = "Dirichlet-Neumann / Neumann-Dirichlet time domain decomposition for parabolic optimal control"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Run configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "./out")]
    out: PathBuf,
    /// Seed for randomized initial guesses
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweeps (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence-factor sweep over an eigenvalue grid
    Analyze(CommonOpts),
    /// Closed-form and numerical minimax relaxation parameters
    ThetaOpt(CommonOpts),
    /// Discrete two-subdomain runs against the monolithic reference
    Solve(CommonOpts),
    /// End-to-end self checks; exit code 0 only if everything passes
    Verify(CommonOpts),
}

impl Command {
    fn opts(&self) -> &CommonOpts {
        match self {
            Command::Analyze(o) | Command::ThetaOpt(o) | Command::Solve(o) | Command::Verify(o) => {
                o
            }
        }
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("TDD_LOG", "error"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let opts = cli.command.opts();

    let cfg = RunConfig::load(&opts.config)?;
    std::fs::create_dir_all(&opts.out)
        .with_context(|| format!("creating output directory {}", opts.out.display()))?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if opts.jobs > 0 {
        pool = pool.num_threads(opts.jobs);
    }
    let pool = pool.build().context("building worker pool")?;

    let ok = pool.install(|| -> Result<bool> {
        match &cli.command {
            Command::Analyze(o) => commands::analyze::run(&cfg, &o.out).map(|_| true),
            Command::ThetaOpt(o) => commands::theta_opt::run(&cfg, &o.out).map(|_| true),
            Command::Solve(o) => commands::solve::run(&cfg, &o.out, o.seed).map(|_| true),
            Command::Verify(o) => commands::verify::run(&cfg, &o.out, o.seed),
        }
    })?;
    if !ok {
        std::process::exit(1);
    }
    Ok(())
}
