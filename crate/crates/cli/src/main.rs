mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use arproj_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

/// Exact checks of sum/difference projection bounds and the digit constructions around them.
#[derive(Parser, Debug)]
#[command(name = "arproj", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub output: Format,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Enumeration cap; the default depends on the command.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: Option<u64>,
    /// Maximum number of worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a digit-pattern instance and report its slice sizes.
    Construct(ConstructArgs),
    /// Check the inequality chains on an instance file.
    Verify(VerifyArgs),
    /// Check the chain-counting lower bound.
    Lemma(LemmaArgs),
    /// Search digit patterns for large exponents.
    Search(SearchArgs),
    /// Tabulate the dimension bounds.
    Dimensions(DimensionsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Example1,
    Example2,
    PatternFile,
}

/// `auto` or a positive integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutoOr {
    Auto,
    Value(u64),
}

impl FromStr for AutoOr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(AutoOr::Auto);
        }
        match s.parse::<u64>() {
            Ok(v) if v > 0 => Ok(AutoOr::Value(v)),
            _ => Err(format!("expected `auto` or a positive integer, got `{s}`")),
        }
    }
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    pub which: Which,
    /// Pattern JSON, required with `pattern-file`.
    pub path: Option<PathBuf>,
    /// Number of digits.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Digit base.
    #[arg(long = "M", default_value = "auto")]
    pub base: AutoOr,
    /// Write the instance JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChainChoice {
    #[value(name = "6")]
    Six,
    #[value(name = "4")]
    Four,
    Both,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub file: PathBuf,
    /// Shared cardinality budget.
    #[arg(long = "N", default_value = "auto")]
    pub budget: AutoOr,
    #[arg(long, value_enum, default_value_t = ChainChoice::Both)]
    pub chain: ChainChoice,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["file", "random", "from_instance"])))]
pub struct LemmaArgs {
    /// Problem JSON: `{"size": k, "labelings": [{"labels": [...], "label_count": m}, ...]}`.
    pub file: Option<PathBuf>,
    /// Check this many random problems.
    #[arg(long)]
    pub random: Option<u64>,
    /// Use `X = G` labeled by the first coordinate.
    #[arg(long)]
    pub from_instance: Option<PathBuf>,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_size: u64,
    #[arg(long, default_value_t = 3)]
    pub max_maps: u64,
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_labels: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Exhaustive,
    BranchBound,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Digits range over `0..=K`.
    #[arg(long = "K")]
    pub k: u32,
    #[arg(long)]
    pub constrain_d: bool,
    /// Defaults to exhaustive for K <= 4 and branch-bound above.
    #[arg(long, value_enum)]
    pub mode: Option<ModeChoice>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub node_budget: Option<u64>,
    /// Seconds.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub time_budget: Option<u64>,
    /// Score patterns by `#Δ` and admit non-injective ones.
    #[arg(long)]
    pub allow_non_injective: bool,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub witness_cap: Option<u64>,
    /// Write the result JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DimensionsArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: i64,
    #[arg(long, default_value_t = 13)]
    pub n_max: i64,
}

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_HYPOTHESIS: u8 = 3;
pub const EXIT_BUDGET: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::HypothesisViolated(_) => EXIT_HYPOTHESIS,
        Error::EnumerationCapExceeded { .. } | Error::InstanceTooLarge(_) => EXIT_BUDGET,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.global.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let g = &cli.global;
    let result = match &cli.command {
        Command::Construct(a) => commands::construct(g, a),
        Command::Verify(a) => commands::verify(g, a),
        Command::Lemma(a) => commands::lemma(g, a),
        Command::Search(a) => commands::search(g, a),
        Command::Dimensions(a) => commands::dimensions(g, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
