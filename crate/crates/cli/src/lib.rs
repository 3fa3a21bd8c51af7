//! Command-line front end for `bayesbag`.
//!
//! Subcommands reproduce the two-row interval table of the Gaussian location
//! example, run the bagging pipeline on user data, and export bootstrapped
//! CDF curves as long-format CSV for plotting elsewhere.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use bayesbag::diagnostics::{sup_distance, CurvePoint};
use bayesbag::{
    bayesbag_exact, bayesbag_mc, build_band, credible_interval, make_report, simulate, BagConfig,
    BagReport, CdfBand, CenterPolicy, Dataset, Envelope, Evaluation, GaussianLocationModel,
    GridSpec, QuantilePair, ResampleScheme, Seed, DEFAULT_REPLICATES, DEFAULT_SEED,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

/// Sample mean for the single-observation row, recovered from its posterior interval center.
pub const TABLE1_XBAR_N1: f64 = 1.325;
/// Sample mean for the ten-observation row, recovered the same way.
pub const TABLE1_XBAR_N10: f64 = 0.72775;
/// True location used when regenerating the table data.
pub const TABLE1_THETA: f64 = 1.31;
pub const DEFAULT_TAU_SQ: f64 = 4.0;
pub const DEFAULT_SIGMA_SQ: f64 = 1.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) | CliError::Output { .. } => 1,
        }
    }
}

impl From<bayesbag::Error> for CliError {
    fn from(e: bayesbag::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "bayesbag", version, about = "Bagged Bayesian posteriors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior and bagged 95% intervals for the n=1 and n=10 location examples.
    Table1(Table1Args),
    /// Run the bagging pipeline on a dataset and write report.csv.
    Bag(BagArgs),
    /// Write every bootstrapped posterior CDF to curves.csv.
    Curves(CurvesArgs),
    /// Draw a synthetic dataset from N(theta, sigma_sq) and write it as CSV.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Closed-form bagged posterior (default).
    #[arg(long, conflicts_with = "mc")]
    pub exact: bool,
    /// Monte Carlo mixture of B replicate posteriors.
    #[arg(long)]
    pub mc: bool,
    #[arg(long = "B", default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Regenerate data from theta = 1.31 instead of using the recovered sample means.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Parametric,
    Nonparametric,
    Subsample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CenterArg {
    Mean,
    Map,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// One observation per line; an optional non-numeric header line is skipped.
    #[arg(
        long,
        required_unless_present = "synthetic_n",
        conflicts_with = "synthetic_n"
    )]
    pub input: Option<PathBuf>,
    /// Generate this many observations instead of reading --input.
    #[arg(long)]
    pub synthetic_n: Option<usize>,
    /// True location for generated data.
    #[arg(long, default_value_t = TABLE1_THETA, allow_negative_numbers = true)]
    pub theta: f64,
    /// Seed for generated data.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub gen_seed: u64,
    #[arg(long, default_value_t = DEFAULT_TAU_SQ, allow_negative_numbers = true)]
    pub tau_sq: f64,
    #[arg(long, default_value_t = DEFAULT_SIGMA_SQ, allow_negative_numbers = true)]
    pub sigma_sq: f64,
    #[arg(long, value_enum, default_value_t = SchemeArg::Parametric)]
    pub scheme: SchemeArg,
    /// Subsample size; defaults to ceil(n/2).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "B", default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    #[arg(long, value_enum, default_value_t = CenterArg::Mean)]
    pub center: CenterArg,
    #[arg(long, default_value_t = 0.95, allow_negative_numbers = true)]
    pub level: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BagArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Use the Monte Carlo mixture even when the closed form is available.
    #[arg(long)]
    pub mc: bool,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 401)]
    pub grid_points: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = TABLE1_THETA, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = DEFAULT_SIGMA_SQ, allow_negative_numbers = true)]
    pub sigma_sq: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Validated settings shared by `bag` and `curves`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: GaussianLocationModel,
    pub data: Dataset,
    pub bag: BagConfig,
    pub level: f64,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let model = GaussianLocationModel::new(args.tau_sq, args.sigma_sq)?;
        if !(args.level > 0.0 && args.level < 1.0) {
            return Err(CliError::Input(format!(
                "level must lie in (0, 1), got {}",
                args.level
            )));
        }
        if args.replicates == 0 {
            return Err(CliError::Input("--B must be at least 1".into()));
        }
        let data = match (&args.input, args.synthetic_n) {
            (Some(path), _) => read_dataset(path)?,
            (None, Some(n)) => simulate(&model, args.theta, n, Seed::new(args.gen_seed, 0))?,
            (None, None) => return Err(CliError::Input("no input given".into())),
        };
        let scheme = match args.scheme {
            SchemeArg::Parametric => ResampleScheme::ParametricBootstrap,
            SchemeArg::Nonparametric => ResampleScheme::NonparametricBootstrap,
            SchemeArg::Subsample => ResampleScheme::Subsample { m: args.m },
        };
        scheme.output_len(data.len())?;
        let center = match args.center {
            CenterArg::Mean => CenterPolicy::SampleMean,
            CenterArg::Map => CenterPolicy::Map,
        };
        Ok(RunConfig {
            model,
            data,
            bag: BagConfig::default()
                .with_replicates(args.replicates)
                .with_scheme(scheme)
                .with_seed(args.seed)
                .with_center(center),
            level: args.level,
            out: args.out.clone(),
        })
    }
}

/// Parses one observation per line. Blank lines are ignored and a first
/// non-blank line whose first token is not a number is taken as a header.
pub fn parse_observations(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_first = false;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let token = line.split(',').next().unwrap_or("").trim();
        let first = !seen_first;
        seen_first = true;
        match token.parse::<f64>() {
            Ok(x) if x.is_finite() => values.push(x),
            Ok(_) => {
                return Err(CliError::Input(format!(
                    "line {}: non-finite input {token:?}",
                    idx + 1
                )))
            }
            Err(_) if first && !looks_numeric(token) => {}
            Err(_) => {
                return Err(CliError::Input(format!(
                    "line {}: malformed number {token:?}",
                    idx + 1
                )))
            }
        }
    }
    Ok(values)
}

fn looks_numeric(token: &str) -> bool {
    token
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.'))
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(Dataset::new(parse_observations(&text)?)?)
}

/// 17 significant digits; parses back to the same `f64`.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn two_dp(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Output {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// One row of the interval table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub n: usize,
    pub xbar: f64,
    pub posterior: QuantilePair,
    pub bayesbag: QuantilePair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BagMethod {
    Exact,
    MonteCarlo { replicates: usize, seed: u64 },
}

/// Datasets behind the two table rows.
pub fn table1_data(simulated: Option<u64>) -> Result<(Dataset, Dataset)> {
    match simulated {
        None => Ok((
            Dataset::new(vec![TABLE1_XBAR_N1])?,
            Dataset::new(vec![TABLE1_XBAR_N10; 10])?,
        )),
        Some(seed) => {
            let model = GaussianLocationModel::new(DEFAULT_TAU_SQ, DEFAULT_SIGMA_SQ)?;
            let ten = simulate(&model, TABLE1_THETA, 10, Seed::new(seed, 0))?;
            let one = Dataset::new(ten.observations()[..1].to_vec())?;
            Ok((one, ten))
        }
    }
}

pub fn table1_rows(method: BagMethod, simulated: Option<u64>) -> Result<Vec<Table1Row>> {
    let model = GaussianLocationModel::new(DEFAULT_TAU_SQ, DEFAULT_SIGMA_SQ)?;
    let (one, ten) = table1_data(simulated)?;
    [one, ten]
        .iter()
        .map(|data| {
            let posterior = credible_interval(&model.posterior(data), 0.95)?;
            let bayesbag = match method {
                BagMethod::Exact => credible_interval(
                    &bayesbag_exact(&model, data, CenterPolicy::SampleMean),
                    0.95,
                )?,
                BagMethod::MonteCarlo { replicates, seed } => {
                    let cfg = BagConfig::default()
                        .with_replicates(replicates)
                        .with_seed(seed);
                    credible_interval(&bayesbag_mc(&model, data, &cfg)?, 0.95)?
                }
            };
            Ok(Table1Row {
                n: data.len(),
                xbar: data.mean(),
                posterior,
                bayesbag,
            })
        })
        .collect()
}

pub fn table1_csv(rows: &[Table1Row], method: BagMethod) -> String {
    let (name, replicates) = match method {
        BagMethod::Exact => ("exact", 0),
        BagMethod::MonteCarlo { replicates, .. } => ("mc", replicates),
    };
    let mut out = String::from(
        "n,xbar,posterior_lo,posterior_hi,bayesbag_lo,bayesbag_hi,\
         posterior_lo_2dp,posterior_hi_2dp,bayesbag_lo_2dp,bayesbag_hi_2dp,method,B\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{name},{replicates}",
            r.n,
            full(r.xbar),
            full(r.posterior.lo),
            full(r.posterior.hi),
            full(r.bayesbag.lo),
            full(r.bayesbag.hi),
            two_dp(r.posterior.lo),
            two_dp(r.posterior.hi),
            two_dp(r.bayesbag.lo),
            two_dp(r.bayesbag.hi),
        );
    }
    out
}

pub fn table1_text(rows: &[Table1Row]) -> String {
    let mut out = format!(
        "{:<12}{:<28}{:<28}\n",
        "Sample size", "(2.5%,97.5%) posterior", "(2.5%,97.5%) BayesBag"
    );
    for r in rows {
        let pair = |q: &QuantilePair| format!("({}, {})", two_dp(q.lo), two_dp(q.hi));
        let _ = writeln!(
            out,
            "{:<12}{:<28}{:<28}",
            format!("n={}", r.n),
            pair(&r.posterior),
            pair(&r.bayesbag)
        );
    }
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "n={}: xbar={} posterior=({}, {}) bayesbag=({}, {})",
            r.n,
            full(r.xbar),
            full(r.posterior.lo),
            full(r.posterior.hi),
            full(r.bayesbag.lo),
            full(r.bayesbag.hi)
        );
    }
    out
}

pub fn cmd_table1(args: &Table1Args) -> Result<String> {
    let method = if args.mc {
        if args.replicates == 0 {
            return Err(CliError::Input("--B must be at least 1".into()));
        }
        BagMethod::MonteCarlo {
            replicates: args.replicates,
            seed: args.seed,
        }
    } else {
        BagMethod::Exact
    };
    let rows = table1_rows(method, args.simulate.then_some(args.seed))?;
    write_file(&args.out.join("table1.csv"), &table1_csv(&rows, method))?;
    Ok(table1_text(&rows))
}

fn center_name(c: CenterPolicy) -> &'static str {
    match c {
        CenterPolicy::SampleMean => "mean",
        CenterPolicy::Map => "map",
    }
}

pub fn report_csv(cfg: &RunConfig, report: &BagReport) -> String {
    let m = match cfg.bag.scheme {
        ResampleScheme::Subsample { .. } => cfg
            .bag
            .scheme
            .output_len(report.n)
            .map(|m| m.to_string())
            .unwrap_or_default(),
        _ => String::new(),
    };
    let evaluation = match report.evaluation {
        Evaluation::Exact => "exact",
        Evaluation::MonteCarlo => "mc",
    };
    let mut out = String::from(
        "n,tau_sq,sigma_sq,scheme,m,center,evaluation,B,seed,level,\
         posterior_mean,posterior_variance,posterior_lo,posterior_hi,bayesbag_lo,bayesbag_hi,\
         posterior_lo_2dp,posterior_hi_2dp,bayesbag_lo_2dp,bayesbag_hi_2dp,\
         widening_ratio,ks_distance,degenerate_resampling\n",
    );
    let _ = writeln!(
        out,
        "{},{},{},{},{m},{},{evaluation},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        report.n,
        full(cfg.model.tau_sq()),
        full(cfg.model.sigma_sq()),
        cfg.bag.scheme.name(),
        center_name(cfg.bag.center),
        report.replicates,
        cfg.bag.master_seed,
        full(report.level),
        full(report.posterior.mean()),
        full(report.posterior.variance()),
        full(report.posterior_interval.lo),
        full(report.posterior_interval.hi),
        full(report.bagged_interval.lo),
        full(report.bagged_interval.hi),
        two_dp(report.posterior_interval.lo),
        two_dp(report.posterior_interval.hi),
        two_dp(report.bagged_interval.lo),
        two_dp(report.bagged_interval.hi),
        full(report.widening_ratio),
        full(report.ks_distance),
        report.degenerate_resampling,
    );
    out
}

pub fn bag_curves_csv(curve: &[CurvePoint]) -> String {
    let mut out = String::from("u,F_posterior,F_bayesbag\n");
    for c in curve {
        let _ = writeln!(
            out,
            "{},{},{}",
            full(c.u),
            full(c.posterior),
            full(c.bagged)
        );
    }
    out
}

pub fn run_bag(cfg: &RunConfig, force_mc: bool) -> Result<BagReport> {
    let evaluation = if !force_mc && cfg.bag.scheme == ResampleScheme::ParametricBootstrap {
        Evaluation::Exact
    } else {
        Evaluation::MonteCarlo
    };
    Ok(make_report(
        &cfg.model,
        &cfg.data,
        &cfg.bag,
        evaluation,
        cfg.level,
        &GridSpec::default(),
    )?)
}

pub fn cmd_bag(args: &BagArgs) -> Result<String> {
    let cfg = RunConfig::from_args(&args.run)?;
    let report = run_bag(&cfg, args.mc)?;
    write_file(&cfg.out.join("report.csv"), &report_csv(&cfg, &report))?;
    write_file(
        &cfg.out.join("bag_curves.csv"),
        &bag_curves_csv(&report.curve),
    )?;
    let pair = |q: &QuantilePair| format!("({}, {})", two_dp(q.lo), two_dp(q.hi));
    let mut msg = format!(
        "n={} scheme={} posterior {} bayesbag {} widening_ratio={:.6} ks_distance={:.6}\n",
        report.n,
        cfg.bag.scheme.name(),
        pair(&report.posterior_interval),
        pair(&report.bagged_interval),
        report.widening_ratio,
        report.ks_distance
    );
    if report.degenerate_resampling {
        msg.push_str(
            "warning: zero resampling variability (every replicate equals the posterior)\n",
        );
    }
    Ok(msg)
}

/// Sentinel `replicate_id` for the bagged (mean) curve.
pub const MEAN_CURVE_ID: &str = "bayesbag";
/// Sentinel `replicate_id` for the raw posterior curve.
pub const POSTERIOR_CURVE_ID: &str = "posterior";

pub fn curves_csv(band: &CdfBand) -> String {
    let mut out = String::with_capacity(64 * band.grid.len() * (band.replicates() + 2));
    out.push_str("replicate_id,u,F\n");
    let grid: Vec<String> = band.grid.iter().map(|&u| full(u)).collect();
    let mut rows = |id: &str, values: &[f64]| {
        for (u, f) in grid.iter().zip(values) {
            let _ = writeln!(out, "{id},{u},{}", full(*f));
        }
    };
    for (b, row) in band.per_replicate.iter().enumerate() {
        rows(&b.to_string(), row);
    }
    rows(MEAN_CURVE_ID, &band.mean_curve);
    rows(POSTERIOR_CURVE_ID, &band.posterior_curve);
    out
}

pub fn run_curves(cfg: &RunConfig, grid_points: usize) -> Result<CdfBand> {
    Ok(build_band(
        &cfg.model,
        &cfg.data,
        &cfg.bag,
        &GridSpec::default().with_points(grid_points),
        Envelope::MinMax,
    )?)
}

pub fn cmd_curves(args: &CurvesArgs) -> Result<String> {
    let cfg = RunConfig::from_args(&args.run)?;
    let band = run_curves(&cfg, args.grid_points)?;
    write_file(&cfg.out.join("curves.csv"), &curves_csv(&band))?;
    let mean = cfg.model.posterior(&cfg.data).mean();
    let mut msg = format!(
        "wrote {} replicate curves on {} grid points; band width at posterior mean = {:.6}\n",
        band.replicates(),
        band.grid.len(),
        band.width_at(mean)
    );
    if cfg.bag.scheme == ResampleScheme::ParametricBootstrap {
        let exact = bayesbag_exact(&cfg.model, &cfg.data, cfg.bag.center);
        let mix = bayesbag_mc(&cfg.model, &cfg.data, &cfg.bag)?;
        let _ = writeln!(
            msg,
            "sup distance of mean curve to closed form = {:.6}",
            sup_distance(&mix, &exact, &band.grid)
        );
    }
    Ok(msg)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<String> {
    let model = GaussianLocationModel::new(DEFAULT_TAU_SQ, args.sigma_sq)?;
    let data = simulate(&model, args.theta, args.n, Seed::new(args.seed, 0))?;
    let mut out = String::from("x\n");
    for x in data.observations() {
        let _ = writeln!(out, "{}", full(*x));
    }
    write_file(&args.out, &out)?;
    Ok(format!(
        "wrote {} observations to {}\n",
        data.len(),
        args.out.display()
    ))
}

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Table1(a) => cmd_table1(a),
        Command::Bag(a) => cmd_bag(a),
        Command::Curves(a) => cmd_curves(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}
