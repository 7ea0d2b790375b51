use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use spme_cli::{dispatch, parse_config};

/// Stochastic porous medium simulations driven by a TOML configuration.
#[derive(Debug, Parser)]
#[command(name = "spme", version)]
struct Args {
    /// Configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `run.out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for path-parallel work.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: &Args) -> Result<bool> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read {}", args.config.display()))?;
    let mut cfg = parse_config(&text).with_context(|| format!("invalid configuration {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.run.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.run.out = out.clone();
    }
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let outcome = dispatch(&cfg, args.threads)?;
    for (name, ok) in &outcome.checks {
        println!("{name}: {}", if *ok { "pass" } else { "FAIL" });
    }
    println!("wrote {} files to {}", outcome.files.len(), cfg.run.out.display());
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
