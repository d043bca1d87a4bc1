//! `ppw`: pump-probe witness simulations from a JSON run config.
//!
//! Exit codes: 0 success, 1 i/o, 2 config, 3 numerical instability,
//! 4 basis truncation or grid resolution.

mod cache;
mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::cache::Cache;
use crate::commands::{Context, SpectrumKind};
use crate::config::{EngineKind, RunConfig};
use crate::error::CliError;
use crate::output::Output;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineChoice {
    Grid,
    Sos,
    Both,
}

#[derive(Debug, Parser)]
#[command(name = "ppw", version, about = "Pump-probe simulations and the pulse-duration coherence witness")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Propagation engine.
    #[arg(long, value_enum, default_value = "sos", global = true)]
    engine: EngineChoice,

    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Content-addressed result cache directory.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Accepted and ignored: every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Absorption sticks, broadened spectrum and moments.
    Absorption { config: PathBuf },
    /// Incident-frequency-integrated resonance Raman spectrum.
    Raman { config: PathBuf },
    /// Pump-probe traces S_PP(T) for every pulse duration of the ladder.
    Pumpprobe { config: PathBuf },
    /// Witness curve Γ(σ), witness time and classification.
    Witness { config: PathBuf },
    /// Witness pipeline over a parameter axis.
    Sweep { config: PathBuf },
    /// Carrier frequency and longest pulse suggested by the linear spectra.
    Recommend { config: PathBuf },
}

impl Command {
    fn config(&self) -> &PathBuf {
        match self {
            Command::Absorption { config }
            | Command::Raman { config }
            | Command::Pumpprobe { config }
            | Command::Witness { config }
            | Command::Sweep { config }
            | Command::Recommend { config } => config,
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    let config = RunConfig::load(cli.command.config())?;
    let cache = match &cli.cache {
        Some(dir) => Cache::open(dir)?,
        None => Cache::disabled(),
    };
    let engines = match cli.engine {
        EngineChoice::Grid => vec![EngineKind::Grid],
        EngineChoice::Sos => vec![EngineKind::Sos],
        EngineChoice::Both => vec![EngineKind::Grid, EngineKind::Sos],
    };
    let ctx = Context {
        config: &config,
        engines,
        cache: &cache,
        out: Output::new(&config, cli.out.as_deref())?,
    };
    let result = match cli.command {
        Command::Absorption { .. } => commands::cmd_spectrum(&ctx, SpectrumKind::Absorption),
        Command::Raman { .. } => commands::cmd_spectrum(&ctx, SpectrumKind::Raman),
        Command::Pumpprobe { .. } => commands::cmd_pumpprobe(&ctx),
        Command::Witness { .. } => commands::cmd_witness(&ctx),
        Command::Sweep { .. } => commands::cmd_sweep(&ctx),
        Command::Recommend { .. } => commands::cmd_recommend(&ctx),
    };
    if cli.cache.is_some() {
        eprintln!("cache: {} hits, {} misses", cache.hits(), cache.misses());
    }
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
