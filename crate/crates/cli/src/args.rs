use std::path::PathBuf;

use bayes_core::conjugate::SummaryStats;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_GRID_POINTS: usize = 4001;

#[derive(Debug, Parser)]
#[command(name = "bayes", version, about = "Bayesian inference for standard models, in batch")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior, posterior mean and MAP estimate.
    Estimate(EstimateArgs),
    /// Highest-posterior-density region.
    Hpd(HpdArgs),
    /// Bayes factors and posterior probabilities of hypotheses.
    Test(TestArgs),
    /// g-prior linear regression with per-coefficient Bayes factors.
    Regress(RegressArgs),
    /// Student-t posterior predictive of a normal sample.
    Predict(PredictArgs),
    /// Leave-one-out predictive outlier scan.
    Outliers(OutliersArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    BetaBinomial,
    GammaPoisson,
    NormalKnownVar,
    NormalNig,
    NormalJeffreys,
    CauchyNormal,
}

impl Model {
    pub fn label(self) -> &'static str {
        match self {
            Model::BetaBinomial => "beta-binomial",
            Model::GammaPoisson => "gamma-poisson",
            Model::NormalKnownVar => "normal-known-var",
            Model::NormalNig => "normal-nig",
            Model::NormalJeffreys => "normal-jeffreys",
            Model::CauchyNormal => "cauchy-normal",
        }
    }
}

/// A sample given inline, as a one-column CSV, or as summary statistics.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Comma-separated observations.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub data: Option<Vec<f64>>,

    /// CSV file with a header row.
    #[arg(long)]
    pub data_file: Option<PathBuf>,

    /// Column of --data-file to read (optional when the file has one column).
    #[arg(long)]
    pub column: Option<String>,

    /// Summary statistics `n=..,mean=..,ssd=..` (ssd: sum of squared deviations).
    #[arg(long, value_parser = parse_stats)]
    pub stats: Option<SummaryStats>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Lower end of the evaluation grid (default: chosen from the posterior).
    #[arg(long, allow_hyphen_values = true)]
    pub grid_min: Option<f64>,

    /// Upper end of the evaluation grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_max: Option<f64>,

    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub grid_points: usize,

    /// Write the normalized density grid (`x,density`) to this file.
    /// Relative paths resolve against $BAYES_OUTPUT_DIR when set.
    #[arg(long)]
    pub grid_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Model,

    #[command(flatten)]
    pub data: DataArgs,

    /// beta-binomial: number of successes.
    #[arg(long)]
    pub successes: Option<u64>,
    /// beta-binomial: number of trials.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    pub prior_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub prior_b: f64,

    /// gamma-poisson: Gamma prior shape.
    #[arg(long)]
    pub prior_shape: Option<f64>,
    /// gamma-poisson: Gamma prior rate.
    #[arg(long)]
    pub prior_rate: Option<f64>,
    /// gamma-poisson: comma-separated counts.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub counts: Option<Vec<u64>>,
    /// gamma-poisson: exposures matching --counts (default all 1).
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub exposures: Option<Vec<f64>>,
    /// Contingency CSV: keep only rows of this group.
    #[arg(long)]
    pub group: Option<String>,

    /// normal-known-var: the known observation variance.
    #[arg(long)]
    pub known_var: Option<f64>,
    /// normal-known-var: prior mean (ignored when the precision is 0).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub prior_mean: f64,
    /// normal-known-var: prior precision; 0 is the flat prior.
    #[arg(long, default_value_t = 0.0)]
    pub prior_precision: f64,

    #[command(flatten)]
    pub nig: NigPriorArgs,

    /// cauchy-normal: variance of the normal prior on the location.
    #[arg(long)]
    pub prior_var: Option<f64>,
}

/// Normal–Inverse-Gamma prior hyperparameters; all zero is noninformative.
#[derive(Debug, Clone, Args)]
pub struct NigPriorArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub xi: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_mu: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub prior_alpha: f64,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct HpdArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,

    /// Posterior mass left outside the region.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// normal-nig / normal-jeffreys: approximate the joint (μ, σ²) region
    /// from this many posterior draws instead of a grid on μ.
    #[arg(long)]
    pub sample: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Slab {
    Normal,
    Flat,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["point_null", "point_null_improper", "one_sided"])))]
pub struct TestArgs {
    /// H0: θ = 0 against a N(0, τ²) slab, x ~ N(θ, σ²).
    #[arg(long)]
    pub point_null: bool,
    /// H0: θ = 0 against a flat slab with weight 1/2, x ~ N(θ, 1).
    #[arg(long)]
    pub point_null_improper: bool,
    /// H0: θ ≤ 0 under a flat prior, x ~ N(θ, 1).
    #[arg(long)]
    pub one_sided: bool,

    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, conflicts_with = "tau")]
    pub tau_sq: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Prior probability of H0.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, value_enum, default_value_t = Slab::Normal)]
    pub slab: Slab,

    /// Sweep τ over `lo,hi,points` log-spaced values.
    #[arg(long, value_parser = parse_sweep)]
    pub sweep_tau: Option<Sweep>,
    /// Write the sweep (`tau,bf10,posterior_prob`) to this file.
    #[arg(long, requires = "sweep_tau")]
    pub sweep_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegressArgs {
    /// CSV with a header row; every column numeric.
    #[arg(long)]
    pub data_file: PathBuf,
    /// Name of the response column; every other column is a covariate.
    #[arg(long)]
    pub response: String,
    /// Prior scale g (default: n).
    #[arg(long)]
    pub g: Option<f64>,
    /// Do not add an intercept column.
    #[arg(long)]
    pub no_intercept: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub nig: NigPriorArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TailRuleArg {
    Split,
    PerTail,
}

#[derive(Debug, Args)]
pub struct OutliersArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Nominal level α: with no outliers, all n checks pass with probability α.
    #[arg(long, default_value_t = 0.95)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = TailRuleArg::Split)]
    pub tail_rule: TailRuleArg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, points] = parts[..] else {
        return Err("expected lo,hi,points".into());
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    let points: usize = points.parse().map_err(|_| format!("bad point count {points:?}"))?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err("need 0 < lo < hi".into());
    }
    if points < 2 {
        return Err("need at least 2 points".into());
    }
    Ok(Sweep { lo, hi, points })
}

fn parse_stats(s: &str) -> Result<SummaryStats, String> {
    let (mut n, mut mean, mut ssd) = (None, None, None);
    for part in s.split(',') {
        let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got {part:?}"))?;
        let bad = || format!("bad value for {key}: {value:?}");
        match key.trim() {
            "n" => n = Some(value.trim().parse::<u64>().map_err(|_| bad())?),
            "mean" => mean = Some(value.trim().parse::<f64>().map_err(|_| bad())?),
            "ssd" => ssd = Some(value.trim().parse::<f64>().map_err(|_| bad())?),
            other => return Err(format!("unknown statistic {other:?} (expected n, mean, ssd)")),
        }
    }
    match (n, mean, ssd) {
        (Some(n), Some(mean), Some(ssd)) => SummaryStats::new(n, mean, ssd).map_err(|e| e.to_string()),
        _ => Err("need all of n, mean and ssd".into()),
    }
}
