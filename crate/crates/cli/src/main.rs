//! `entest`: entropy-based goodness-of-fit tests and power studies.
//!
//! Exit status: 0 when the null is not rejected (or a command succeeds),
//! 1 when it is rejected, 2 on usage or input errors.

mod data;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use entest::harness::{
    bundled_config, emit_power_csv, emit_power_svg, emit_reference_csv, in_pool, parse_config, run_power_study_with_workers,
    PowerStudyConfig,
};
use entest::kstest::{calibrate_table, ks_critical_simple, ks_p_value, run_ks_test, CalibrationCache, KsCriticalRule};
use entest::moments::SimpleNull;
use entest::regression::{DesignRule, LinearModelSpec};
use entest::rng::{DistributionSpec, SeedSpec};

#[derive(Parser)]
#[command(name = "entest", version, about = "Entropy-based goodness-of-fit tests and Monte Carlo power studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test a sample (one value per line) against a simple null.
    Test(TestArgs),
    /// Run a power study from a config file.
    Simulate(SimulateArgs),
    /// Monte Carlo KS critical values for standardized regression residuals.
    Calibrate(CalibrateArgs),
    /// Reproduce one of the bundled power tables next to its published values.
    Tables(TablesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum NullKind {
    Normal,
    Cauchy,
    CustomCfIntegral,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Et,
    Ks,
}

#[derive(clap::Args)]
struct TestArgs {
    /// Data file.
    data: PathBuf,
    #[arg(long, value_enum, default_value = "normal")]
    null: NullKind,
    /// Location used to standardize the data.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    /// Scale used to standardize the data.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// ∫₋₁¹ φ(it) dt of the standardized null, for `--null custom-cf-integral`.
    #[arg(long)]
    cf_integral: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "et")]
    method: Method,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Override the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the config's master seed.
    #[arg(long, env = "ENTEST_SEED")]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    workers: Option<usize>,
    /// Lilliefors calibration cache file.
    #[arg(long)]
    calibration_cache: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SimulateArgs {
    config: PathBuf,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
    /// Optional SVG of the power curves.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(clap::Args)]
struct TablesArgs {
    /// a1, a2, a3, a4, a5 or a6.
    which: String,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(clap::Args)]
struct CalibrateArgs {
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = entest::kstest::DEFAULT_CALIBRATION_TRIALS)]
    trials: usize,
    #[arg(long, env = "ENTEST_SEED", default_value_t = 0)]
    seed: u64,
    /// Uniform(0,1) regressors besides the intercept.
    #[arg(long, default_value_t = 1)]
    uniform_columns: usize,
    #[arg(long)]
    workers: Option<usize>,
    /// Cache file to read and update.
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Test(a) => cmd_test(a),
        Command::Simulate(a) => cmd_simulate(a).map(|_| false),
        Command::Calibrate(a) => cmd_calibrate(a).map(|_| false),
        Command::Tables(a) => cmd_tables(a).map(|_| false),
    };
    match outcome {
        Ok(false) => ExitCode::from(0),
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether the null was rejected.
fn cmd_test(a: TestArgs) -> Result<bool> {
    let values = data::read_values(&a.data)?;
    if values.len() < 2 {
        bail!("need at least 2 observations, got {}", values.len());
    }
    if a.cf_integral.is_some() && !matches!(a.null, NullKind::CustomCfIntegral) {
        bail!("--cf-integral only applies to --null custom-cf-integral");
    }
    let null = match a.null {
        NullKind::Normal => SimpleNull::Normal { mu: a.mu, sigma: a.sigma },
        NullKind::Cauchy => SimpleNull::Cauchy { loc: a.mu, scale: a.sigma },
        NullKind::CustomCfIntegral => SimpleNull::CustomCf {
            mu: a.mu,
            sigma: a.sigma,
            cf_integral: a.cf_integral.context("--null custom-cf-integral needs --cf-integral")?,
        },
    };
    let result = match a.method {
        Method::Et => null.et_test(&values, a.alpha)?,
        Method::Ks => {
            let cdf = null
                .standard_cdf()
                .context("KS needs a null with a CDF; use --null normal or cauchy")?;
            let critical = ks_critical_simple(values.len(), a.alpha)?;
            let mut r = run_ks_test(&null.standardize(&values)?, cdf, critical)?;
            r.p_value = Some(ks_p_value(r.statistic, values.len(), KsCriticalRule::FiniteSample));
            r
        }
    };
    let mut out = io::stdout().lock();
    writeln!(out, "method: {}", match a.method {
        Method::Et => "et",
        Method::Ks => "ks",
    })?;
    writeln!(out, "null: {}", describe(&null))?;
    writeln!(out, "n: {}", values.len())?;
    writeln!(out, "alpha: {}", a.alpha)?;
    writeln!(out, "{result}")?;
    Ok(result.reject)
}

fn describe(null: &SimpleNull) -> String {
    match *null {
        SimpleNull::Normal { mu, sigma } => format!("normal({mu}, {sigma})"),
        SimpleNull::Cauchy { loc, scale } => format!("cauchy({loc}, {scale})"),
        SimpleNull::CustomCf { mu, sigma, cf_integral } => format!("custom-cf({mu}, {sigma}; {cf_integral})"),
    }
}

fn apply_overrides(config: &mut PowerStudyConfig, run: &RunArgs) -> Result<()> {
    if let Some(t) = run.trials {
        config.trials = t;
    }
    if let Some(s) = run.seed {
        config.master_seed = s;
    }
    if let Some(p) = &run.calibration_cache {
        config.ks.calibration_cache = Some(p.clone());
    }
    config.validate()?;
    Ok(())
}

fn workers(w: Option<usize>) -> usize {
    w.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("cannot read {}", a.config.display()))?;
    let mut config = parse_config(&text).with_context(|| format!("in {}", a.config.display()))?;
    apply_overrides(&mut config, &a.run)?;
    let table = run_power_study_with_workers(&config, workers(a.run.workers))?;
    emit_power_csv(&table, &a.out)?;
    if let Some(svg) = &a.svg {
        emit_power_svg(&table, svg)?;
    }
    Ok(())
}

fn cmd_tables(a: TablesArgs) -> Result<()> {
    let bundled = bundled_config(&a.which)?;
    let mut config = bundled.study()?;
    apply_overrides(&mut config, &a.run)?;
    let table = run_power_study_with_workers(&config, workers(a.run.workers))?;
    let reference = |label: &str, n: usize| bundled.reference(label, n);
    match &a.out {
        Some(path) => {
            let mut buf = Vec::new();
            emit_reference_csv(&table, &mut buf, reference)?;
            fs::write(path, buf).with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => emit_reference_csv(&table, io::stdout().lock(), reference)?,
    }
    if let Some(svg) = &a.svg {
        emit_power_svg(&table, svg)?;
    }
    Ok(())
}

fn cmd_calibrate(a: CalibrateArgs) -> Result<()> {
    let model = LinearModelSpec {
        beta: vec![0.0; 1 + a.uniform_columns],
        sigma2: 1.0,
        design: DesignRule::InterceptPlusUniform {
            uniform_columns: a.uniform_columns,
        },
        error_process: DistributionSpec::standard_normal(),
    };
    let mut cache = match &a.cache {
        Some(p) => Some(CalibrationCache::open(p)?),
        None => None,
    };
    let table = in_pool(workers(a.workers), || {
        calibrate_table(&a.n, a.alpha, &model, a.trials, SeedSpec::new(a.seed, 0), cache.as_mut())
    })??;
    let mut out = io::stdout().lock();
    writeln!(out, "alpha: {}", a.alpha)?;
    writeln!(out, "trials: {}", a.trials)?;
    writeln!(out, "design_hash: {}", table.design_hash)?;
    for (n, d) in &table.entries {
        writeln!(out, "critical[{n}]: {d}")?;
    }
    Ok(())
}
