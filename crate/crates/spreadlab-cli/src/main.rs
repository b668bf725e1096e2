//! `spreadlab`: one binary binding the library's checkers and experiments
//! into reproducible, machine-readable runs.
//!
//! Ground rules, enforced here rather than per subcommand:
//!
//! * Every stochastic path takes an explicit `--seed` (or a seed embedded
//!   in `--mode sampled:COUNT:SEED`). A missing seed is an input error;
//!   nothing ever falls back to wall-clock entropy.
//! * JSON reports are wrapped in a fixed envelope (schema version, tool
//!   version, subcommand, config echo, wall time) and are byte-identical
//!   across runs with the same inputs and seeds, except for the
//!   `wall_time_ms` field. CSV output is bare rows for plotting and has
//!   no envelope.
//! * Exit codes: 0 success, 1 invalid input (bad flags, unreadable or
//!   malformed files, dimension mismatches), 2 work budget exceeded,
//!   3 postcondition failure (a decomposition that does not verify, an
//!   inequality that does not hold).

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

mod out;
mod run;

use out::Failure;

#[derive(Parser)]
#[command(
    name = "spreadlab",
    version,
    about = "Exact GF(2) set geometry, spreadness certificates, and GHZ repetition experiments",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Cap on pair-bitset bits (2^(2n)) any single operation may allocate.
    #[arg(long, global = true, default_value_t = 1u64 << 28)]
    max_pairs: u64,

    /// Cap on explicitly materialized square triples.
    #[arg(long, global = true, default_value_t = 1u64 << 22)]
    max_triples: u64,

    /// Print progress notes to stderr. Never affects report bytes.
    #[arg(long, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check or sample algebraic spreadness of a set inside a space.
    ///
    /// Exits 0 whether or not the set passes; the verdict is the report.
    SpreadCheck(SpreadCheckArgs),
    /// Decompose three sets into spread coset-aligned pieces and verify.
    Uniformize(UniformizeArgs),
    /// Exact square-cover counting report for a set triple.
    SquareCover(SquareCoverArgs),
    /// Exact game value by strategy brute force.
    GameValue(GameValueArgs),
    /// Per-coordinate conditional win rates of a strategy battery.
    HardCoordinate(HardCoordinateArgs),
    /// Tail frequencies of battery strategies on repeated play.
    Concentration(ConcentrationArgs),
    /// Entropy and conditional-marginal reports on a random triple set.
    AppendixCheck(AppendixCheckArgs),
}

#[derive(Args)]
struct SpreadCheckArgs {
    /// Set file: {"n": dim, "members": [..]}.
    #[arg(long)]
    set: String,
    /// Space file: {"n": dim, "offset": o, "basis": [..]}. Defaults to the
    /// full ambient space.
    #[arg(long)]
    space: Option<String>,
    /// Codimension radius of the check.
    #[arg(long)]
    r: u32,
    /// Density slack, rational ("1/4" or "0.25").
    #[arg(long)]
    eps: String,
    /// "exact" or "sampled:COUNT[:SEED]".
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Seed for sampled mode when --mode carries none.
    #[arg(long)]
    seed: Option<u64>,
    /// Report destination: a path, "json" for stdout. Default stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct UniformizeArgs {
    /// X set file.
    #[arg(long)]
    x: String,
    /// Y set file.
    #[arg(long)]
    y: String,
    /// Z set file.
    #[arg(long)]
    z: String,
    /// Ambient space file; must be linear. Defaults to the full space.
    #[arg(long)]
    space: Option<String>,
    /// Codimension radius of the per-piece spread certificates.
    #[arg(long)]
    r: u32,
    /// Density slack of the certificates, rational.
    #[arg(long)]
    eps: String,
    /// Fraction of diagonal pairs the decomposition may leave uncovered.
    #[arg(long)]
    eta: String,
    /// Recursion depth cap: "auto" or a number.
    #[arg(long, default_value = "auto")]
    depth: String,
    /// Report destination: a path, "json" for stdout. Default stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SquareCoverArgs {
    /// X set file.
    #[arg(long)]
    x: String,
    /// Y set file.
    #[arg(long)]
    y: String,
    /// Z set file.
    #[arg(long)]
    z: String,
    /// Destination: a path (.csv selects CSV), "json" or "csv" for stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct GameValueArgs {
    /// Game file, or the literal "ghz".
    #[arg(long)]
    game: String,
    /// Value the n-fold repetition instead of the base game.
    #[arg(long)]
    reps: Option<u32>,
    /// Optional JSON report path; the value always goes to stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct HardCoordinateArgs {
    /// Base game file, or the literal "ghz".
    #[arg(long)]
    game: String,
    /// Repetition count; must equal the ambient dimension of E, F, G.
    #[arg(long)]
    n: u32,
    /// Event set files over F2^n, one per player.
    #[arg(long)]
    e: String,
    #[arg(long)]
    f: String,
    #[arg(long)]
    g: String,
    /// Battery name; "default" is the fixed 50-strategy battery.
    #[arg(long, default_value = "default")]
    battery: String,
    /// Master seed for battery construction.
    #[arg(long)]
    seed: Option<u64>,
    /// Report destination: a path, "json" for stdout. Default stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ConcentrationArgs {
    /// Base game file, or the literal "ghz".
    #[arg(long, default_value = "ghz")]
    game: String,
    /// Number of repetitions (1..=64).
    #[arg(long)]
    n: u32,
    /// Tail slack over the game value, rational.
    #[arg(long)]
    eps: String,
    /// Random queries played per strategy.
    #[arg(long)]
    trials: u64,
    /// Master seed; battery and trial streams split from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Destination: a path (.csv selects CSV), "json" or "csv" for stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct AppendixCheckArgs {
    /// "entropy" or "marginal".
    #[arg(long)]
    which: String,
    /// Ambient dimension of the random triple set (1..=10).
    #[arg(long)]
    n: u32,
    /// Seed for the density-9/10 random triple set.
    #[arg(long)]
    seed: Option<u64>,
    /// Report destination: a path, "json" for stdout. Default stdout.
    #[arg(long)]
    out: Option<String>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep clap's rendering but our exit-code contract: help and
            // version are successes, every other parse problem is invalid
            // input, never 2 (reserved for blown budgets).
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let budgets = spreadlab::Budgets {
        max_pair_bits: cli.max_pairs,
        max_triples: cli.max_triples,
        ..Default::default()
    };
    let ctx = run::Ctx {
        budgets,
        verbose: cli.verbose,
    };
    let outcome = match cli.cmd {
        Cmd::SpreadCheck(a) => run::spread_check(&ctx, &a),
        Cmd::Uniformize(a) => run::uniformize(&ctx, &a),
        Cmd::SquareCover(a) => run::square_cover(&ctx, &a),
        Cmd::GameValue(a) => run::game_value(&ctx, &a),
        Cmd::HardCoordinate(a) => run::hard_coordinate(&ctx, &a),
        Cmd::Concentration(a) => run::concentration(&ctx, &a),
        Cmd::AppendixCheck(a) => run::appendix_check(&ctx, &a),
    };
    if let Err(Failure { code, message }) = outcome {
        eprintln!("error: {message}");
        std::process::exit(code);
    }
}
