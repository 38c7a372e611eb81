//! `acoalg`: build ACO systems from the process algebra, run them, explore
//! their state spaces, check them against the sequential algorithms and
//! generate instances.

mod commands;
mod setup;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Stable exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Validation = 1,
    Deadlock = 2,
    Limit = 3,
    Divergence = 4,
}

#[derive(Parser, Debug)]
#[command(name = "acoalg", version, about = "Ant colony systems as process algebra terms")]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "ANTALGEBRA_OUT", default_value = "acoalg-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a system to completion and write its trace, trails and summary.
    Run(RunArgs),
    /// Enumerate the reachable state space.
    Explore(ExploreArgs),
    /// Compare a run with the sequential reference algorithm.
    Verify(VerifyArgs),
    /// Write a random Euclidean instance.
    GenInstance(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchedulerKind {
    Fixed,
    RoundRobin,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TraceLevel {
    Summary,
    Events,
    Deltas,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    /// A single `stop`.
    Stop,
    /// `a!;stop ∥ b?;stop`, which deadlocks.
    Mismatched,
    /// `a!;stop ∥ a?;stop`.
    Handshake,
}

/// What to build: an ACO variant on an instance, or a demo system.
#[derive(Args, Debug, Default)]
pub struct SystemArgs {
    /// TOML parameter file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in demo system instead of an ACO variant.
    #[arg(long, value_enum, conflicts_with_all = ["instance", "generate"])]
    pub demo: Option<Demo>,
    /// Variant, e.g. fine-as, fine-acs-free, coarse-mmas, coarse-occasional.
    #[arg(long)]
    pub variant: Option<String>,
    /// Instance file (`n`, then `n` rows of distances).
    #[arg(long, conflicts_with = "generate")]
    pub instance: Option<PathBuf>,
    /// Generate a Euclidean instance with this many vertices.
    #[arg(long)]
    pub generate: Option<usize>,
    /// Seed of the generated instance.
    #[arg(long)]
    pub instance_seed: Option<u64>,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Args, Debug, Default)]
pub struct ParamArgs {
    /// Trail mathematics of coarse-occasional: as, mmas or acs.
    #[arg(long)]
    pub algorithm: Option<String>,
    /// Ants (per copy for coarse variants).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Deposit constant of the AS update.
    #[arg(long = "Q")]
    pub q: Option<f64>,
    #[arg(long)]
    pub tau0: Option<f64>,
    #[arg(long)]
    pub tau_min: Option<f64>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long)]
    pub q0: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long = "max-it")]
    pub max_it: Option<usize>,
    /// Start vertex of each ant, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub starts: Option<Vec<usize>>,
    /// Copies of a coarse variant.
    #[arg(long)]
    pub p: Option<usize>,
    /// Sharing period of coarse-occasional.
    #[arg(long)]
    pub u: Option<usize>,
    /// best, average or weighted:<lambda>.
    #[arg(long)]
    pub sharing: Option<String>,
    /// Close tours back to their first vertex.
    #[arg(long)]
    pub closed_tour: bool,
    /// ACS offline update from the best tour so far.
    #[arg(long)]
    pub acs_global_best: bool,
    /// Sends carry the whole sender state.
    #[arg(long)]
    pub full_state_sends: bool,
}

#[derive(Args, Debug, Default)]
pub struct LimitArgs {
    /// Step bound of the run.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Wall-clock bound in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Seed of the probabilistic choices.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub scheduler: Option<SchedulerKind>,
    /// Seed of the random scheduler; defaults to --seed.
    #[arg(long)]
    pub scheduler_seed: Option<u64>,
    #[command(flatten)]
    pub limits: LimitArgs,
    /// What the trace records.
    #[arg(long, value_enum)]
    pub verbosity: Option<TraceLevel>,
    /// One thread per component over rendezvous channels. Interleavings
    /// are not reproducible.
    #[arg(long)]
    pub native: bool,
}

#[derive(Args, Debug)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_states: usize,
    /// Exit with the deadlock status if any deadlock is found.
    #[arg(long)]
    pub expect_deadlock_free: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Evaporation used by the reference side only.
    #[arg(long)]
    pub oracle_rho: Option<f64>,
    #[command(flatten)]
    pub limits: LimitArgs,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(short, long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Destination file; defaults to instance-n<N>-s<SEED>.txt in the output
    /// directory.
    #[arg(short, long)]
    pub file: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => commands::run(a, &cli.out),
        Command::Explore(a) => commands::explore(a, &cli.out),
        Command::Verify(a) => commands::verify(a, &cli.out),
        Command::GenInstance(a) => commands::gen_instance(a, &cli.out),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::Validation as u8)
        }
    }
}
