//! `decomp`: candidate microservice decompositions from codebase-model
//! files.
//!
//! Exit codes are a stable contract for harnesses: 0 success, 1 I/O or
//! parse failures, 2 validation and flag problems, 3 strategy inapplicable
//! to the model, 4 statistical preconditions not met.

mod cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use decomp_core::model::{Linkage, Strategy};

pub const EXIT_IO: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INAPPLICABLE: u8 = 3;
pub const EXIT_STATS: u8 = 4;

/// Command failure carrying the process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

pub type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(
    name = "decomp",
    version,
    about = "Identify candidate microservice decompositions of a monolith from a codebase model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Fvcg,
    Fvsa,
    Sa,
    Cv,
    Ev,
    /// Sweep every strategy.
    All,
}

impl StrategyArg {
    fn strategies(self) -> Vec<Strategy> {
        match self {
            StrategyArg::Fvcg => vec![Strategy::Fvcg],
            StrategyArg::Fvsa => vec![Strategy::Fvsa],
            StrategyArg::Sa => vec![Strategy::Sa],
            StrategyArg::Cv => vec![Strategy::Cv],
            StrategyArg::Ev => vec![Strategy::Ev],
            StrategyArg::All => Strategy::ALL.to_vec(),
        }
    }

    fn single(self) -> Option<Strategy> {
        match self.strategies().as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LinkageArg {
    Single,
    Complete,
    Average,
}

impl From<LinkageArg> for Linkage {
    fn from(arg: LinkageArg) -> Linkage {
        match arg {
            LinkageArg::Single => Linkage::Single,
            LinkageArg::Complete => Linkage::Complete,
            LinkageArg::Average => Linkage::Average,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ValidateFormat {
    Text,
    Json,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of domain entities.
    #[arg(long)]
    entities: usize,
    /// Number of functionalities.
    #[arg(long)]
    functionalities: usize,
    #[arg(long, default_value_t = 3)]
    methods_per_class: usize,
    /// Embedding dimension of the stand-in vectors.
    #[arg(long, default_value_t = 384)]
    dimension: usize,
    /// Trace length range, inclusive, as LO,HI.
    #[arg(long, default_value = "1,6", value_parser = parse_usize_pair)]
    trace_range: (usize, usize),
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output model file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    model: PathBuf,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    #[arg(long, value_enum)]
    linkage: LinkageArg,
    /// Call-graph depth (call-graph strategy only).
    #[arg(long)]
    depth: Option<u32>,
    /// Controller,service,entity,intermediate weights summing to 100.
    #[arg(long, value_parser = parse_four)]
    type_weights: Option<[f64; 4]>,
    /// Read,write weights summing to 100.
    #[arg(long, value_parser = parse_two)]
    access_weights: Option<[f64; 2]>,
    /// Access,read,write,sequence weights summing to 100.
    #[arg(long, value_parser = parse_four)]
    measure_weights: Option<[f64; 4]>,
    /// Requested number of clusters.
    #[arg(long)]
    n: usize,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    model: PathBuf,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Output directory for metrics.csv, decompositions.jsonl, and
    /// diagnostics.log.
    #[arg(long)]
    out_dir: PathBuf,
    /// Weight grid step in percent; must divide 100.
    #[arg(long, default_value_t = 10)]
    step: u32,
    /// Call-graph depth range as LO,HI.
    #[arg(long, default_value = "1,6", value_parser = parse_u32_pair)]
    depth_range: (u32, u32),
    /// Linkage criteria to sweep.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [LinkageArg::Single, LinkageArg::Complete, LinkageArg::Average])]
    linkages: Vec<LinkageArg>,
    /// Parallel workers; results merge in canonical order regardless.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct CompareArgs {
    /// Metrics CSV files; two or more compare file against file, a single
    /// file compares its strategies against each other.
    #[arg(required = true)]
    csv: Vec<PathBuf>,
    #[arg(long, default_value = "combined")]
    metric: String,
    /// Compare per actual cluster count instead of pooling.
    #[arg(long)]
    by_clusters: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegressArgs {
    csv: PathBuf,
    /// Parameter columns, comma separated (e.g. wc,ws,we,wi or depth).
    #[arg(long, value_delimiter = ',', required = true)]
    params: Vec<String>,
    #[arg(long, default_value = "combined")]
    metric: String,
    /// Fit without an intercept term.
    #[arg(long)]
    no_intercept: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SummarizeArgs {
    csv: PathBuf,
    /// Grouping fields, comma separated (codebase, strategy, linkage,
    /// depth, requestedN, actualN). Empty groups everything together.
    #[arg(long, value_delimiter = ',')]
    group_by: Vec<String>,
    #[arg(long, default_value = "combined")]
    metric: String,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    format: ReportFormat,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file against every invariant and print the report.
    Validate {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = ValidateFormat::Text)]
        format: ValidateFormat,
    },
    /// Generate a deterministic synthetic model.
    Synth(SynthArgs),
    /// Produce one decomposition for one parameter tuple.
    Generate(GenerateArgs),
    /// Score a decomposition (or several) against a model.
    Evaluate {
        model: PathBuf,
        #[arg(required = true)]
        decompositions: Vec<PathBuf>,
        /// Normalization maximum for uniform complexity.
        #[arg(long)]
        max_complexity: Option<f64>,
    },
    /// Run the full parameter sweep and write metrics, decompositions, and
    /// diagnostics.
    Sweep(SweepArgs),
    /// Welch comparisons between strategies or between CSV files.
    Compare(CompareArgs),
    /// Least-squares regression of a metric on parameter columns.
    Regress(RegressArgs),
    /// Five-number summaries per group.
    Summarize(SummarizeArgs),
}

fn parse_usize_pair(text: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected LO,HI, got '{text}'"));
    }
    let lo = parts[0].trim().parse().map_err(|_| format!("bad number '{}'", parts[0]))?;
    let hi = parts[1].trim().parse().map_err(|_| format!("bad number '{}'", parts[1]))?;
    Ok((lo, hi))
}

fn parse_u32_pair(text: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = parse_usize_pair(text)?;
    Ok((lo as u32, hi as u32))
}

fn parse_numbers<const N: usize>(text: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got '{text}'"));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.trim().parse().map_err(|_| format!("bad number '{part}'"))?;
    }
    Ok(out)
}

fn parse_four(text: &str) -> Result<[f64; 4], String> {
    parse_numbers::<4>(text)
}

fn parse_two(text: &str) -> Result<[f64; 2], String> {
    parse_numbers::<2>(text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DECOMP_LOG", "error"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { model, format } => cmd::validate(&model, format),
        Command::Synth(args) => cmd::synth(&args),
        Command::Generate(args) => cmd::generate(&args),
        Command::Evaluate { model, decompositions, max_complexity } => {
            cmd::evaluate(&model, &decompositions, max_complexity)
        }
        Command::Sweep(args) => cmd::sweep(&args),
        Command::Compare(args) => cmd::compare(&args),
        Command::Regress(args) => cmd::regress(&args),
        Command::Summarize(args) => cmd::summarize(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
