mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};

use config::{load_layers, RunConfig};

/// Tight frames interpolating between wavelet and Gabor analysis.
///
/// Settings come from built-in defaults, then `--config`, then the flags
/// below; `--set key=value` reaches every config key.
#[derive(Parser)]
#[command(name = "framelab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Flat key = value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Truncation window N1,N2,M1,M2.
    #[arg(long, global = true)]
    window: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// time or frequency.
    #[arg(long, global = true)]
    kind: Option<String>,
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Signal to compare a reconstruction against.
    #[arg(long, global = true)]
    reference: Option<PathBuf>,
    /// Any config key, as key=value. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the fiducial and report its partition deviation and norm.
    GenWavelet,
    /// Sample atoms for an index or window.
    Atoms,
    /// Compute frame coefficients of a signal file.
    Analyze,
    /// Synthesize a signal from a coefficient table.
    Reconstruct,
    /// Check that coefficient energy equals the frame constant times ‖f‖².
    VerifyTight,
    /// Tightness, atom distance and reconstruction error across eps_list.
    SweepEps,
    /// First-order convergence of atoms and the group law as eps → 0.
    VerifyContraction,
    /// Closed-form admissibility constants against direct quadrature.
    Admissibility,
    /// Truncated resolution of the identity for a Gaussian fiducial.
    ResolutionId,
}

fn overrides(c: &Common) -> Result<Vec<(String, String)>> {
    let mut v = Vec::new();
    for s in &c.set {
        let (k, val) = s
            .split_once('=')
            .ok_or_else(|| anyhow!("--set expects key=value, got '{s}'"))?;
        v.push((k.trim().to_string(), val.trim().to_string()));
    }
    let flags = [
        ("eps", c.eps.map(|e| e.to_string())),
        ("window", c.window.clone()),
        ("out", c.out.as_ref().map(|p| p.display().to_string())),
        ("seed", c.seed.map(|s| s.to_string())),
        ("kind", c.kind.clone()),
        ("input", c.input.as_ref().map(|p| p.display().to_string())),
        ("reference", c.reference.as_ref().map(|p| p.display().to_string())),
    ];
    for (k, val) in flags {
        if let Some(val) = val {
            v.push((k.to_string(), val));
        }
    }
    Ok(v)
}

fn init_threads() -> Result<()> {
    let n = match std::env::var("FRAMELAB_THREADS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| anyhow!("FRAMELAB_THREADS must be a non-negative integer, got '{s}'"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    init_threads()?;
    let map = load_layers(cli.common.config.as_deref(), &overrides(&cli.common)?)?;
    let rc = RunConfig::from_map(&map)?;
    let outcome = match cli.command {
        Command::GenWavelet => commands::gen_wavelet(&rc),
        Command::Atoms => commands::atoms(&rc),
        Command::Analyze => commands::analyze_cmd(&rc),
        Command::Reconstruct => commands::reconstruct(&rc),
        Command::VerifyTight => commands::verify_tight(&rc),
        Command::SweepEps => commands::sweep_eps(&rc),
        Command::VerifyContraction => commands::verify_contraction(&rc),
        Command::Admissibility => commands::admissibility(&rc),
        Command::ResolutionId => commands::resolution_id(&rc),
    }?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
