use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::help::SYNTAX_HELP;

#[derive(Debug, Parser)]
#[command(
    name = "ouroboros",
    version,
    about = "Check membership in idempotent function spaces"
)]
#[command(after_long_help = SYNTAX_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether f(f(x), ..., f(x)) = f(x) holds on the domain.
    Check(CheckArgs),
    /// Compare the fixed points of f with its image.
    Image(CheckArgs),
    /// Simulate running means of one sample path per seed.
    Slln(SllnArgs),
    /// Check mean_n for a list of arities.
    Sweep(SweepArgs),
    /// List the built-in functions.
    Catalog(OutputArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Tolerance {
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "eps-abs", default_value_t = 1e-9)]
    pub eps_abs: f64,
    #[arg(long = "eps-rel", default_value_t = 1e-9)]
    pub eps_rel: f64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Function body, e.g. "mean(x1, x2)".
    #[arg(long = "fn", conflicts_with = "name", required_unless_present = "name")]
    pub expr: Option<String>,
    /// Catalog function name, e.g. mean_3.
    #[arg(long)]
    pub name: Option<String>,
    /// Domain spec, e.g. "R^2" or "real[0,1] x int[0..9]".
    #[arg(long)]
    pub domain: Option<String>,
    #[command(flatten)]
    pub tolerance: Tolerance,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SllnArgs {
    /// uniform(a,b), bernoulli(p), normal(mu,sigma) or exponential(lambda).
    #[arg(long)]
    pub dist: String,
    #[arg(long = "n-max", default_value_t = 1_000_000)]
    pub n_max: u64,
    /// Comma-separated sample sizes; defaults to powers of two and n-max.
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Draw input vectors from this distribution instead of the domain.
    #[arg(long, conflicts_with = "domain")]
    pub dist: Option<String>,
    /// Base domain A for mean_n over A^n.
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,8,16,64,256,1024")]
    pub arities: Vec<usize>,
    #[command(flatten)]
    pub tolerance: Tolerance,
    #[command(flatten)]
    pub output: OutputArgs,
}
