use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "extremal", version, about = "Extremal set-family formulas, exact oracles and smoothing experiments")]
pub struct RunSpec {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// File of key=value lines overriding smoothing and budget defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for sweeps and enumeration (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Seed for randomized runs; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the closed-form extremal values.
    #[command(subcommand)]
    Compute(Problem),
    /// Run the exact oracle and compare it with the closed forms.
    #[command(subcommand)]
    Audit(Problem),
    /// Parameter sweeps.
    #[command(subcommand)]
    Sweep(Sweep),
    /// Exact maximum by branch and bound.
    #[command(subcommand)]
    Oracle(OracleProblem),
    /// Build an extremal family and print it in the line format.
    #[command(subcommand)]
    Construct(ConstructProblem),
    /// Smoothed maximization from a seeded start.
    #[command(subcommand)]
    Smooth(SmoothProblem),
}

#[derive(Subcommand, Debug)]
pub enum Problem {
    Matching(MatchingArgs),
    Intersect(IntersectArgs),
}

#[derive(Args, Debug, Clone, Copy)]
pub struct MatchingArgs {
    /// Forbidden matching size ℓ.
    #[arg(long = "l")]
    pub ell: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct IntersectArgs {
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub t: usize,
}

#[derive(Subcommand, Debug)]
pub enum Sweep {
    /// Compare the two matching formulas over a grid.
    Lemma2(GridArgs),
    /// Find increases of the a-sweep term as a decreases inside each block.
    Monotonicity(GridArgs),
    /// Compare the block-sum bound with the closed-form value.
    Section3(IntersectGridArgs),
}

#[derive(Args, Debug, Clone, Copy)]
pub struct GridArgs {
    #[arg(long = "l-max")]
    pub ell_max: usize,
    #[arg(long = "k-max")]
    pub k_max: usize,
    #[arg(long = "n-max")]
    pub n_max: usize,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct IntersectGridArgs {
    #[arg(long = "s-max")]
    pub s_max: usize,
    #[arg(long = "t-max")]
    pub t_max: usize,
    #[arg(long = "k-max")]
    pub k_max: usize,
    #[arg(long = "n-max")]
    pub n_max: usize,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct BudgetArgs {
    /// Node cap (overrides the config file).
    #[arg(long)]
    pub max_nodes: Option<u64>,
    /// Wall-clock cap in seconds (overrides the config file).
    #[arg(long)]
    pub max_seconds: Option<f64>,
    /// Restrict the search to left-compressed families.
    #[arg(long)]
    pub compressed: bool,
    /// Include elapsed time in the output (breaks byte-for-byte reproducibility).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum OracleProblem {
    Matching {
        #[command(flatten)]
        p: MatchingArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    Intersect {
        #[command(flatten)]
        q: IntersectArgs,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum ConstructProblem {
    /// `{x : |x ∩ [ℓi−1]| ≥ i}`.
    Matching {
        #[command(flatten)]
        p: MatchingArgs,
        #[arg(long)]
        i: usize,
        /// Write the family to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// `{x : |x ∩ [t+rs]| ≥ t+(s−1)r}`.
    Intersect {
        #[command(flatten)]
        q: IntersectArgs,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct SmoothArgs {
    /// Pin the support of β to [a].
    #[arg(long)]
    pub support: Option<usize>,
    /// Write the per-iteration trace as CSV to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum SmoothProblem {
    Matching {
        #[command(flatten)]
        p: MatchingArgs,
        #[command(flatten)]
        opts: SmoothArgs,
    },
    Intersect {
        #[command(flatten)]
        q: IntersectArgs,
        #[command(flatten)]
        opts: SmoothArgs,
    },
}
