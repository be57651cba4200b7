use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mechcat::pipeline::commands::DEFAULT_ORACLE_SEED;
use mechcat::pipeline::{execute, Command, Output, RunConfig};

#[derive(Parser)]
#[command(name = "mechcat", version, about = "Heralded mechanical cat states: simulation and figure tables")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON run configuration; defaults to the reference device.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run directory for the manifest, CSV tables and Wigner grids.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overwrite a non-empty run directory.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Refine the phase-space grids by this factor.
    #[arg(long, global = true)]
    grid_scale: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mechanical squeezing from the red/blue pulse pair.
    Squeeze,
    /// Photon subtraction: herald probability, fidelity, negativity.
    Subtract,
    /// Heralding followed by storage.
    Store,
    /// Storage and readout into the cavity output.
    Readout,
    /// The full protocol.
    Pipeline,
    /// Optimize transmissivity (and cavity squeezing) for each amplitude.
    Optimize,
    /// Fidelity curves versus cat amplitude.
    Fig2,
    /// Wigner grids of the six heralded states.
    Fig3,
    /// Readout negativity versus storage time and temperature.
    Fig4,
    /// Compare the analytic model with the Fock-space model.
    OracleCheck {
        /// Number of randomized cases in addition to the figure states.
        #[arg(long, default_value_t = 20)]
        random: usize,
        #[arg(long, default_value_t = DEFAULT_ORACLE_SEED)]
        seed: u64,
    },
}

fn run(cli: Cli) -> mechcat::Result<i32> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.grid_scale {
        cfg.task.grid = cfg.task.grid.scaled(f)?;
    }
    let out_dir = cli.out.or_else(|| cfg.task.output_dir.as_ref().map(PathBuf::from));
    let out = Output { dir: out_dir, force: cli.force };
    let command = match cli.command {
        Cmd::Squeeze => Command::Squeeze,
        Cmd::Subtract => Command::Subtract,
        Cmd::Store => Command::Store,
        Cmd::Readout => Command::Readout,
        Cmd::Pipeline => Command::Pipeline,
        Cmd::Optimize => Command::Optimize,
        Cmd::Fig2 => Command::Fig2,
        Cmd::Fig3 => Command::Fig3,
        Cmd::Fig4 => Command::Fig4,
        Cmd::OracleCheck { random, seed } => Command::OracleCheck { random, seed },
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| mechcat::Error::Config(e.to_string()))?;
    let outcome = pool.install(|| execute(command, &cfg, &out))?;
    println!("{}", serde_json::to_string_pretty(&outcome.manifest.scalars())?);
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
