//! `rgg-limits`: sample point processes, solve graph and weighted
//! functionals, estimate limit constants, run the property suite and build
//! plot data from stored records.

mod commands;
mod points;
mod report;
mod store;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Environment variables with this prefix override global flags.
pub const ENV_PREFIX: &str = "RGG_LIMITS_";

#[derive(Debug, Parser)]
#[command(name = "rgg-limits", version, about = "Limit constants of random geometric graph functionals")]
pub struct Cli {
    /// Master seed.
    #[arg(long, global = true, env = "RGG_LIMITS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "RGG_LIMITS_WORKERS")]
    pub workers: Option<usize>,
    /// Directory for records.jsonl and CSV summaries.
    #[arg(long, global = true, env = "RGG_LIMITS_OUT")]
    pub out: Option<PathBuf>,
    /// Format of standard output.
    #[arg(long, global = true, env = "RGG_LIMITS_FORMAT", value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a point sample and write it as point CSV.
    Sample(SampleArgs),
    /// Evaluate a graph parameter or weighted functional on a point file.
    Solve(SolveArgs),
    /// Monte Carlo and deterministic estimates of limit constants.
    Estimate(EstimateArgs),
    /// Run the randomized property suite.
    Proptest(ProptestArgs),
    /// Turn stored records into tables, .dat files and gnuplot scripts.
    Report(ReportArgs),
    /// Run the command described by a TOML experiment file.
    Run(RunArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    /// `binomial` (n points), `poisson` (mean t) or `homogeneous` (intensity
    /// lambda on Q_s).
    #[arg(long, default_value = "binomial")]
    pub process: String,
    /// Distribution: `uniform`, `segment:x0,y0:x1,y1` (any dimension), or
    /// `mix:<a>:x0,y0:x1,y1`, uniform mass `a` plus a segment.
    #[arg(long, default_value = "uniform")]
    pub dist: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    /// alpha, gamma, theta, gammainf, gammainf-multi, vc, psi:K2, psi:K3,
    /// psi:P3, eta, sigma, comps; or tsp, mm, bm, btsp, mst.
    #[arg(long, alias = "param")]
    pub functional: String,
    #[arg(long)]
    pub input: PathBuf,
    /// Second point file for bm and btsp.
    #[arg(long)]
    pub input2: Option<PathBuf>,
    /// Connection radius, or the scale for weighted functionals.
    #[arg(long, alias = "scale", default_value_t = 1.0)]
    pub radius: f64,
    /// exact or heur.
    #[arg(long, default_value = "exact")]
    pub mode: String,
    /// Weight spec, e.g. `pow:1.5`, `indicator`, `trunc:pow:2:0.8`.
    #[arg(long, default_value = "indicator")]
    pub weight: String,
    /// Node limit for exact branch and bound.
    #[arg(long)]
    pub node_limit: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateMode {
    Box,
    Cluster,
    Thermo,
    Dense,
    Sweep,
    Density,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long, value_enum)]
    pub mode: EstimateMode,
    /// Registered functional, weighted `tsp|mm|mst` (with --weight), or for
    /// density mode one of packing, covering, hexagon, zeta-star:<functional>.
    #[arg(long)]
    pub functional: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Intensities (comma separated for sweep).
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Box side.
    #[arg(long)]
    pub s: Option<f64>,
    /// Sample sizes for thermo and dense runs.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Thermodynamic constant t = n r^d.
    #[arg(long)]
    pub t: Option<f64>,
    /// Dense radius exponent a in r_n = n^{-a} (default 1/(2d)).
    #[arg(long)]
    pub radius_exp: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Periodic boundary for box and sweep modes.
    #[arg(long)]
    pub periodic: bool,
    #[arg(long)]
    pub cluster_cap: Option<usize>,
    /// Distribution for thermo and dense modes (see `sample --dist`).
    #[arg(long, default_value = "uniform")]
    pub dist: String,
    #[arg(long, default_value = "indicator")]
    pub weight: String,
    /// Search budget for the zeta-star lower bound.
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    /// Also write a gnuplot-ready .dat file to the output directory.
    #[arg(long)]
    pub dat: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProptestArgs {
    #[arg(long)]
    pub property: Option<String>,
    #[arg(long)]
    pub functional: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Dimensions to test.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub d: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    /// Records file (default: <out>/records.jsonl).
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    pub config: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Runs a parsed command line; `Ok(false)` signals reported failures.
pub fn dispatch(cli: Cli) -> Result<bool> {
    if let Command::Run(r) = &cli.command {
        let text = std::fs::read_to_string(&r.config).with_context(|| format!("reading {}", r.config.display()))?;
        let cfg = store::ExperimentConfig::from_toml(&text)?;
        let args = cfg.to_args()?;
        let mut inner = Cli::try_parse_from(&args).map_err(|e| anyhow::anyhow!("invalid config: {e}"))?;
        // Output format is a display choice, not part of the experiment.
        inner.format = cli.format;
        if inner.out.is_none() {
            inner.out = cli.out.clone();
        }
        if matches!(inner.command, Command::Run(_)) {
            anyhow::bail!("a config cannot invoke `run`");
        }
        return dispatch(inner);
    }
    if let Some(w) = cli.workers {
        // Fails harmlessly if a pool already exists (repeated dispatch).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
    commands::execute(&cli)
}
