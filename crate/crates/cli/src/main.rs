//! `hatlab`: run hat games, sweep thresholds, build losing colorings and
//! search for free subsets from the command line.
//!
//! Exit codes: 0 on success (for `play`: someone won cleanly), 1 when the
//! command ran but the answer is negative (nobody won, no losing coloring
//! exists, a bound was not met), 2 on rule violations and errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "hatlab", version, about = "Hat games with finitely many looks and bounded guess lists")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Distinct hats one logician may look at.
    #[arg(long, global = true, default_value_t = 256)]
    pub budget: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Play one game and print the transcript.
    Play(PlayArgs),
    /// Tabulate winnable and losing finite games.
    Sweep(SweepArgs),
    /// Build a coloring on which every logician guesses wrong.
    Defeat(DefeatArgs),
    /// Check sets and search for independent subsets of a function family.
    Free(FreeArgs),
    /// Convert between set-valued and single-valued families, or to a partition.
    Convert(ConvertArgs),
    /// Estimate the win rate of a single-guess strategy on the ω-game.
    Refute(RefuteArgs),
    /// Time a few fixed workloads.
    Bench(BenchArgs),
}

#[derive(Args)]
pub struct PlayArgs {
    /// Game spec: `(λ,κ,γ)`, `chain(N)`, `parity(N)` or JSON.
    #[arg(long)]
    pub spec: String,
    #[arg(long)]
    pub strategy: String,
    /// Comma-separated hats, or a JSON coloring.
    #[arg(long)]
    pub coloring: String,
    /// Window for ω-populations.
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Values or ranges, e.g. `1..3` or `1,2,3`.
    #[arg(long, default_value = "1..3")]
    pub lambda: String,
    #[arg(long, default_value = "2..3")]
    pub gamma: String,
    #[arg(long, default_value = "1..8")]
    pub kappa: String,
    /// Most colorings per cell.
    #[arg(long, default_value_t = 1 << 22)]
    pub cap: u128,
    /// Most profile-coloring games for strategy-space searches.
    #[arg(long, default_value_t = 1 << 20)]
    pub space_cap: u128,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DefeatMode {
    Exhaustive,
    Poset,
    Sequential,
}

#[derive(Args)]
pub struct DefeatArgs {
    /// Defaults to `poset` when `--poset` is given, else `exhaustive`.
    #[arg(long, value_enum)]
    pub mode: Option<DefeatMode>,
    #[arg(long)]
    pub spec: Option<String>,
    /// JSON poset file.
    #[arg(long)]
    pub poset: Option<PathBuf>,
    #[arg(long)]
    pub strategy: String,
    /// Palette size for `--poset`.
    #[arg(long)]
    pub k: Option<u64>,
    /// Guess bound for `--poset`.
    #[arg(long)]
    pub g: Option<usize>,
    /// Promise sizes for `sequential`, e.g. `2,3`.
    #[arg(long)]
    pub ladder: Option<String>,
    #[arg(long, default_value_t = 1 << 24)]
    pub cap: u128,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Mutual,
    Forwards,
}

#[derive(Args)]
pub struct FreeArgs {
    /// JSON function family.
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Mutual)]
    pub mode: ModeArg,
    /// Check this set instead of searching, e.g. `1,3`.
    #[arg(long)]
    pub set: Option<String>,
    /// Close the family first, bounds `arity,depth`.
    #[arg(long)]
    pub close: Option<String>,
    /// Extract a mutually independent subset of the forwards independent `--set`.
    #[arg(long)]
    pub extract: bool,
    /// Search the family's partition for a homogeneous set of this size.
    #[arg(long)]
    pub homogeneous: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub cap: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertTarget {
    Plain,
    Sets,
    Partition,
}

#[derive(Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, value_enum)]
    pub to: ConvertTarget,
    /// Outputs have fewer than this many elements (for `plain`).
    #[arg(long)]
    pub gamma: Option<usize>,
    /// `absent` or a ground element used to pad short outputs.
    #[arg(long, default_value = "absent")]
    pub padding: String,
}

#[derive(Args)]
pub struct RefuteArgs {
    /// Window of the ω-game.
    #[arg(long = "N", alias = "window", default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value = "constant-guess")]
    pub strategy: String,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    /// Exit 1 unless the upper confidence bound is below this.
    #[arg(long, default_value_t = 0.52)]
    pub threshold: f64,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Smaller workloads.
    #[arg(long)]
    pub quick: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Play(a) => commands::play(&cli.common, a),
        Command::Sweep(a) => commands::sweep(&cli.common, a),
        Command::Defeat(a) => commands::defeat(&cli.common, a),
        Command::Free(a) => commands::free(&cli.common, a),
        Command::Convert(a) => commands::convert(&cli.common, a),
        Command::Refute(a) => commands::refute(&cli.common, a),
        Command::Bench(a) => commands::bench(&cli.common, a),
    };
    match result.and_then(|(report, code)| commands::emit(&cli.common, &report).map(|_| code)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
