use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ssc_core::guarantees::Convention;
use ssc_core::harness::{run, Command, ExperimentConfig};

/// Greedy sparse subspace clustering experiments.
#[derive(Parser)]
#[command(name = "ssc", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte Carlo check of the noisy inner-product bounds.
    LemmaValidate(Common),
    /// Tabulate extremes of f against a dense-grid reference.
    ExtremalSolve(Common),
    /// Per-iteration residual and AoD averages on synthetic data.
    Trace(Common),
    /// Clustering accuracy versus SNR.
    CcrSweep(Common),
    /// Evaluate selection certificates along actual runs.
    Certify(Common),
    /// Cluster an external data file.
    Cluster(Common),
    /// Write a synthetic data set.
    Gen(Common),
}

#[derive(Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiply n, d and points per subspace.
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long, value_parser = ["lemma", "printed"])]
    convention: Option<String>,
}

impl Cmd {
    fn split(self) -> (Command, Common) {
        match self {
            Cmd::LemmaValidate(c) => (Command::LemmaValidate, c),
            Cmd::ExtremalSolve(c) => (Command::ExtremalSolve, c),
            Cmd::Trace(c) => (Command::Trace, c),
            Cmd::CcrSweep(c) => (Command::CcrSweep, c),
            Cmd::Certify(c) => (Command::Certify, c),
            Cmd::Cluster(c) => (Command::Cluster, c),
            Cmd::Gen(c) => (Command::Gen, c),
        }
    }
}

fn configure(common: Common) -> ssc_core::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(out) = common.out {
        cfg.output_dir = out;
    }
    if let Some(f) = common.scale {
        cfg.scale(f)?;
    }
    if let Some(c) = common.convention {
        cfg.convention = c.parse::<Convention>()?;
    }
    // Relative data paths are resolved against the config file.
    if let (Some(p), Some(dir)) = (&cfg.data_path, common.config.parent()) {
        if p.is_relative() && !p.exists() {
            cfg.data_path = Some(dir.join(p));
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = cli.command.split();
    let result = configure(common).and_then(|cfg| run(cmd, &cfg));
    match result {
        Ok(summary) => {
            for n in &summary.notices {
                eprintln!("notice: {n}");
            }
            for f in &summary.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
