//! Monte Carlo power studies.
//!
//! Every (alternative, n) row draws `trials` independent samples, applies
//! the configured test, and tallies rejections. Trial `t` of row `r` uses
//! stream `r·2³² + t` under the master seed, so a row's outcome does not
//! depend on which rows run or on how many worker threads run them.

mod config;
mod output;
mod tables;

pub use config::parse_config;
pub use output::{emit_power_csv, emit_power_svg, emit_reference_csv, read_power_csv, render_svg, write_power_csv};
pub use tables::{bundled_config, reference_power, ReferenceTable, REFERENCE_TABLES};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kstest::{
    calibrate_table, ks_critical, ks_statistic_with, CalibrationCache, KsCriticalRule, KsCriticalTable, KsStatistic,
    DEFAULT_CALIBRATION_TRIALS,
};
use crate::moments::SimpleNull;
use crate::regression::{run_regression_et, run_regression_ks, LinearModelSpec};
use crate::rng::{sample, DistributionSpec, SeedSpec};

/// Trials beyond this failure fraction abort the study.
const MAX_FAILURE_RATE: f64 = 1e-3;
pub const MIN_TRIALS: usize = 100;
pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    EtSimple,
    KsSimple,
    EtRegression,
    KsRegression,
}

impl TestKind {
    pub fn is_regression(self) -> bool {
        matches!(self, TestKind::EtRegression | TestKind::KsRegression)
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestKind::EtSimple => "et-simple",
            TestKind::KsSimple => "ks-simple",
            TestKind::EtRegression => "et-regression",
            TestKind::KsRegression => "ks-regression",
        })
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "et-simple" => Ok(TestKind::EtSimple),
            "ks-simple" => Ok(TestKind::KsSimple),
            "et-regression" => Ok(TestKind::EtRegression),
            "ks-regression" => Ok(TestKind::KsRegression),
            other => Err(Error::Config(format!(
                "test: unknown test `{other}` (expected et-simple, ks-simple, et-regression or ks-regression)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NullSpec {
    Simple(SimpleNull),
    Regression(LinearModelSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alternative {
    pub label: String,
    pub spec: DistributionSpec,
}

impl Alternative {
    pub fn new(label: impl Into<String>, spec: DistributionSpec) -> Self {
        Self {
            label: label.into(),
            spec,
        }
    }
}

/// KS settings; ignored by ET studies.
#[derive(Debug, Clone, PartialEq)]
pub struct KsOptions {
    pub statistic: KsStatistic,
    pub critical_rule: KsCriticalRule,
    pub calibration_trials: usize,
    pub calibration_cache: Option<PathBuf>,
}

impl Default for KsOptions {
    fn default() -> Self {
        Self {
            statistic: KsStatistic::TwoSided,
            critical_rule: KsCriticalRule::FiniteSample,
            calibration_trials: DEFAULT_CALIBRATION_TRIALS,
            calibration_cache: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerStudyConfig {
    pub test: TestKind,
    pub null: NullSpec,
    pub alternatives: Vec<Alternative>,
    pub sample_sizes: Vec<usize>,
    pub alpha: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub ks: KsOptions,
}

impl PowerStudyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: String| Err(Error::Config(format!("{field}: {why}")));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha", format!("{} is not in (0, 1)", self.alpha));
        }
        if self.trials < MIN_TRIALS {
            return bad("trials", format!("{} is below the minimum {MIN_TRIALS}", self.trials));
        }
        if self.alternatives.is_empty() {
            return bad("alternatives", "list is empty".into());
        }
        if self.sample_sizes.is_empty() {
            return bad("sample_sizes", "list is empty".into());
        }
        let min_n = if self.test.is_regression() { 4 } else { 2 };
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n < min_n) {
            return bad("sample_sizes", format!("{n} is below the minimum {min_n} for {}", self.test));
        }
        for alt in &self.alternatives {
            alt.spec
                .validate()
                .or_else(|e| bad("alternatives", format!("{}: {e}", alt.label)))?;
            if !self.test.is_regression() && alt.spec.is_process() {
                return bad(
                    "alternatives",
                    format!("{}: serially dependent processes need a regression test", alt.label),
                );
            }
        }
        match (&self.null, self.test.is_regression()) {
            (NullSpec::Regression(m), true) => m.validate().or_else(|e| bad("null", e.to_string())),
            (NullSpec::Simple(s), false) => {
                if self.test == TestKind::KsSimple && s.standard_cdf().is_none() {
                    return bad("null", "KS needs a null with a CDF".into());
                }
                Ok(())
            }
            _ => bad("null", format!("does not match test {}", self.test)),
        }?;
        if self.test == TestKind::KsRegression && self.ks.calibration_trials < crate::kstest::MIN_CALIBRATION_TRIALS {
            return bad(
                "calibration_trials",
                format!("{} is below {}", self.ks.calibration_trials, crate::kstest::MIN_CALIBRATION_TRIALS),
            );
        }
        Ok(())
    }

    fn row_count(&self) -> usize {
        self.alternatives.len() * self.sample_sizes.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub alternative: String,
    pub n: usize,
    pub trials: usize,
    pub rejections: usize,
    /// Trials that failed numerically; counted as non-rejections.
    pub failures: usize,
    pub power: f64,
    pub se: f64,
}

impl PowerRow {
    pub fn new(alternative: impl Into<String>, n: usize, trials: usize, rejections: usize, failures: usize) -> Self {
        let power = rejections as f64 / trials as f64;
        Self {
            alternative: alternative.into(),
            n,
            trials,
            rejections,
            failures,
            power,
            se: (power * (1.0 - power) / trials as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerTable {
    pub test: TestKind,
    pub alpha: f64,
    pub rows: Vec<PowerRow>,
}

impl PowerTable {
    pub fn row(&self, alternative: &str, n: usize) -> Option<&PowerRow> {
        self.rows.iter().find(|r| r.alternative == alternative && r.n == n)
    }

    /// Distinct alternatives in first-seen order.
    pub fn alternatives(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.alternative.as_str()) {
                out.push(&r.alternative);
            }
        }
        out
    }
}

/// Stream id of trial `trial` in row `row`.
pub fn trial_stream(row: usize, trial: usize) -> u64 {
    ((row as u64) << 32) + trial as u64
}

/// Runs the study in the current rayon pool.
pub fn run_power_study(config: &PowerStudyConfig) -> Result<PowerTable> {
    config.validate()?;
    let table = match config.test {
        TestKind::KsRegression => Some(calibrate(config)?),
        _ => None,
    };
    let mut rows = Vec::with_capacity(config.row_count());
    for (a, alt) in config.alternatives.iter().enumerate() {
        for (s, &n) in config.sample_sizes.iter().enumerate() {
            let row = a * config.sample_sizes.len() + s;
            rows.push(run_row(config, row, alt, n, table.as_ref())?);
        }
    }
    Ok(PowerTable {
        test: config.test,
        alpha: config.alpha,
        rows,
    })
}

/// Runs the study on a dedicated pool of `workers` threads.
pub fn run_power_study_with_workers(config: &PowerStudyConfig, workers: usize) -> Result<PowerTable> {
    in_pool(workers, || run_power_study(config))?
}

/// Runs `f` on a dedicated rayon pool of `workers` threads.
pub fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("workers: {e}")))?;
    Ok(pool.install(f))
}

/// Lilliefors criticals for every configured n, reusing the on-disk cache if set.
pub fn calibrate(config: &PowerStudyConfig) -> Result<KsCriticalTable> {
    let NullSpec::Regression(model) = &config.null else {
        return Err(Error::Config("null: calibration needs a regression model".into()));
    };
    let seed = SeedSpec::new(config.master_seed, 0);
    let mut cache = match &config.ks.calibration_cache {
        Some(path) => Some(CalibrationCache::open(path)?),
        None => None,
    };
    let table = calibrate_table(
        &config.sample_sizes,
        config.alpha,
        model,
        config.ks.calibration_trials,
        seed,
        cache.as_mut(),
    )?;
    Ok(table)
}

fn run_row(
    config: &PowerStudyConfig,
    row: usize,
    alt: &Alternative,
    n: usize,
    ks_table: Option<&KsCriticalTable>,
) -> Result<PowerRow> {
    let simple_critical = match config.test {
        TestKind::KsSimple => ks_critical(n, config.alpha, config.ks.critical_rule)?,
        _ => 0.0,
    };
    let outcomes: Vec<Result<bool>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let seed = SeedSpec::new(config.master_seed, trial_stream(row, t));
            one_trial(config, &alt.spec, n, seed, simple_critical, ks_table)
        })
        .collect();
    let mut rejections = 0;
    let mut failures = 0;
    let mut first = None;
    for o in outcomes {
        match o {
            Ok(true) => rejections += 1,
            Ok(false) => {}
            Err(e) => {
                failures += 1;
                first.get_or_insert_with(|| e.to_string());
            }
        }
    }
    if failures as f64 > MAX_FAILURE_RATE * config.trials as f64 {
        return Err(Error::TrialFailures {
            failures,
            trials: config.trials,
            first: format!("{} at n = {n}: {}", alt.label, first.unwrap_or_default()),
        });
    }
    Ok(PowerRow::new(alt.label.clone(), n, config.trials, rejections, failures))
}

fn one_trial(
    config: &PowerStudyConfig,
    alt: &DistributionSpec,
    n: usize,
    seed: SeedSpec,
    simple_critical: f64,
    ks_table: Option<&KsCriticalTable>,
) -> Result<bool> {
    match &config.null {
        NullSpec::Simple(null) => {
            let x = sample(alt, n, seed)?;
            match config.test {
                TestKind::EtSimple => Ok(null.et_test(&x, config.alpha)?.reject),
                _ => {
                    let cdf = null.standard_cdf().ok_or_else(|| Error::Unsupported("KS without a null CDF".into()))?;
                    let d = ks_statistic_with(&null.standardize(&x)?, cdf, config.ks.statistic)?;
                    Ok(d > simple_critical)
                }
            }
        }
        NullSpec::Regression(model) => {
            let (y, x) = model.simulate_with(n, alt, seed)?;
            match (config.test, ks_table) {
                (TestKind::KsRegression, Some(table)) => Ok(run_regression_ks(&y, &x, config.alpha, table)?.reject),
                _ => Ok(run_regression_et(&y, &x, config.alpha)?.reject),
            }
        }
    }
}
