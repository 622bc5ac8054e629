use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ou-design", version, about = "Optimal sampling designs for complex OU processes with trend")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Damping parameter (> 0).
    #[arg(long, global = true, default_value_t = 1.0)]
    pub lambda: f64,
    /// Frequency parameter.
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub omega: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fisher information of a design.
    Fim(FimArgs),
    /// Optimal spacings for a criterion.
    Optimize(OptimizeArgs),
    /// Objective, optimum and efficiency grids.
    Surface(SurfaceArgs),
    /// Exact sample paths and Monte-Carlo validation of the trend estimator.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct DesignInput {
    /// Comma-separated, strictly increasing observation times.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "times_file")]
    pub times: Option<Vec<f64>>,
    /// File with one time per line (first CSV column; `#` lines and a header are skipped).
    #[arg(long)]
    pub times_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrendName {
    Constant,
    Chandler,
}

#[derive(Debug, Args)]
pub struct FimArgs {
    #[command(flatten)]
    pub design: DesignInput,
    #[arg(long, value_enum, default_value_t = TrendName::Constant)]
    pub trend: TrendName,
    /// Compare against the dense matrix-trace evaluation.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionName {
    Trend,
    Lambda,
    Omega,
    CovJoint,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeName {
    Equidistant,
    Free,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_enum)]
    pub criterion: CriterionName,
    /// Number of design points.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ModeName::Equidistant)]
    pub mode: ModeName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurfaceKind {
    /// Three-point trend information over (d1, d2).
    Trend2,
    /// Two-point all-parameter determinant over d.
    All1,
    /// Three-point all-parameter determinant over (d1, d2).
    All2,
    /// Optimal trend spacing against omega.
    DstarOmega,
    /// Optimal equidistant all-parameter spacing against omega, per n.
    DallOmega,
    /// Efficiency ratio over (d, lambda), omega = 1.
    EfficiencyLambda,
    /// Efficiency ratio over (d, omega), lambda = 1.
    EfficiencyOmega,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, value_enum)]
    pub kind: SurfaceKind,
    #[arg(long, default_value_t = 0.05)]
    pub d_min: f64,
    #[arg(long, default_value_t = 6.0)]
    pub d_max: f64,
    #[arg(long, default_value_t = 120)]
    pub d_steps: usize,
    /// Parameter axis (lambda or omega) for the curve and efficiency kinds.
    #[arg(long, default_value_t = 0.5)]
    pub p_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 96)]
    pub p_steps: usize,
    /// Design sizes for the efficiency kinds (first value) and `dall-omega`.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub n: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub design: DesignInput,
    /// Equidistant design size when no times are given.
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    /// Equidistant spacing when no times are given; defaults to the optimal trend spacing.
    #[arg(long)]
    pub spacing: Option<f64>,
    #[arg(long, value_enum, default_value_t = TrendName::Constant)]
    pub trend: TrendName,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub m1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub m2: f64,
    /// Stationary variance of each coordinate.
    #[arg(long, default_value_t = 1.0)]
    pub variance: f64,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Summarise the GLS trend estimate over the replicates instead of emitting paths.
    #[arg(long)]
    pub validate: bool,
}
