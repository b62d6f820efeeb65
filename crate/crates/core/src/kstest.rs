//! Kolmogorov–Smirnov comparator.
//!
//! Simple nulls use Kolmogorov's limiting distribution for critical values.
//! When the null's parameters are estimated (regression residuals) the
//! critical values come from a Monte Carlo simulation of the full null
//! pipeline instead (Lilliefors' approach).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::normal_cdf;
use crate::regression::{ols_fit, LinearModelSpec};
use crate::rng::SeedSpec;
use crate::TestResult;

/// Which empirical-distribution gap defines D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KsStatistic {
    /// `max_j max(j/n − F(z₍ⱼ₎), F(z₍ⱼ₎) − (j−1)/n)`, the classical statistic.
    #[default]
    TwoSided,
    /// `max_j |j/n − F(z₍ⱼ₎)|`: the ECDF is compared with F only at the top
    /// of each step. Smaller than the classical D whenever the largest gap
    /// sits at the bottom of a step.
    UpperStep,
}

/// How the simple-null critical value is obtained from Kolmogorov's limit law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KsCriticalRule {
    /// `K_α / (√n + 0.12 + 0.11/√n)`.
    #[default]
    FiniteSample,
    /// `K_α / √n`.
    Asymptotic,
}

/// Classical two-sided KS distance between the sample and `null_cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(data: &[f64], null_cdf: F) -> Result<f64> {
    ks_statistic_with(data, null_cdf, KsStatistic::TwoSided)
}

pub fn ks_statistic_with<F: Fn(f64) -> f64>(
    data: &[f64],
    null_cdf: F,
    kind: KsStatistic,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if let Some(index) = data.iter().position(|v| v.is_nan()) {
        return Err(Error::NonFinite { index });
    }
    let mut sorted = data.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (j, &z) in sorted.iter().enumerate() {
        let f = null_cdf(z);
        let above = (j + 1) as f64 / n - f;
        d = match kind {
            KsStatistic::TwoSided => d.max(above).max(f - j as f64 / n),
            KsStatistic::UpperStep => d.max(above.abs()),
        };
    }
    Ok(d.clamp(0.0, 1.0))
}

/// Limiting Kolmogorov CDF `P(√n D ≤ x)`.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 1.0 {
        // Jacobi theta form; converges fast where the alternating series does not.
        let c = -std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let mut sum = 0.0;
        for k in 1..=20 {
            let odd = (2 * k - 1) as f64;
            sum += (c * odd * odd).exp();
        }
        (2.0 * std::f64::consts::PI).sqrt() / x * sum
    } else {
        1.0 - kolmogorov_sf(x)
    }
}

/// `1 − kolmogorov_cdf(x)` via `2 Σ (−1)^{k−1} e^{−2k²x²}`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x < 1.0 {
        return 1.0 - kolmogorov_cdf(x);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-300 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `K_α` with `kolmogorov_sf(K_α) = α`.
pub fn kolmogorov_quantile(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            what: "KS significance level",
            value: alpha,
        });
    }
    let (mut lo, mut hi) = (1e-3, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn effective_root_n(n: usize, rule: KsCriticalRule) -> f64 {
    let r = (n as f64).sqrt();
    match rule {
        KsCriticalRule::FiniteSample => r + 0.12 + 0.11 / r,
        KsCriticalRule::Asymptotic => r,
    }
}

/// Simple-null critical value `K_α / (√n + 0.12 + 0.11/√n)`.
pub fn ks_critical_simple(n: usize, alpha: f64) -> Result<f64> {
    ks_critical(n, alpha, KsCriticalRule::FiniteSample)
}

pub fn ks_critical(n: usize, alpha: f64, rule: KsCriticalRule) -> Result<f64> {
    if n == 0 {
        return Err(Error::TooFewObservations { given: 0, needed: 1 });
    }
    Ok(kolmogorov_quantile(alpha)? / effective_root_n(n, rule))
}

/// Asymptotic p-value matching [`ks_critical`] under the same rule.
pub fn ks_p_value(d: f64, n: usize, rule: KsCriticalRule) -> f64 {
    kolmogorov_sf(d * effective_root_n(n, rule))
}

/// Rejects iff `D > critical`.
pub fn run_ks_test<F: Fn(f64) -> f64>(data: &[f64], null_cdf: F, critical: f64) -> Result<TestResult> {
    run_ks_test_with(data, null_cdf, critical, KsStatistic::TwoSided)
}

pub fn run_ks_test_with<F: Fn(f64) -> f64>(
    data: &[f64],
    null_cdf: F,
    critical: f64,
    kind: KsStatistic,
) -> Result<TestResult> {
    if critical.is_nan() || critical <= 0.0 {
        return Err(Error::Domain {
            what: "KS critical value",
            value: critical,
        });
    }
    let d = ks_statistic_with(data, null_cdf, kind)?;
    Ok(TestResult::from_statistic(d, critical, None))
}

/// Monte Carlo KS critical values for standardized OLS residuals, by sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct KsCriticalTable {
    pub alpha: f64,
    pub entries: BTreeMap<usize, f64>,
    pub calibration_trials: usize,
    pub seed: SeedSpec,
    pub design_hash: String,
}

impl KsCriticalTable {
    pub fn new(alpha: f64, calibration_trials: usize, seed: SeedSpec, design_hash: String) -> Self {
        Self {
            alpha,
            entries: BTreeMap::new(),
            calibration_trials,
            seed,
            design_hash,
        }
    }

    pub fn critical(&self, n: usize) -> Result<f64> {
        self.entries
            .get(&n)
            .copied()
            .ok_or(Error::MissingCalibration { n, alpha: self.alpha })
    }

    /// Checks that entries do not increase with n.
    pub fn validate(&self) -> Result<()> {
        let mut prev: Option<(usize, f64)> = None;
        for (&n, &d) in &self.entries {
            if let Some((pn, pd)) = prev {
                if d > pd {
                    return Err(Error::NonMonotoneTable {
                        n_small: pn,
                        d_small: pd,
                        n_large: n,
                        d_large: d,
                    });
                }
            }
            prev = Some((n, d));
        }
        Ok(())
    }
}

pub const MIN_CALIBRATION_TRIALS: usize = 1000;
pub const DEFAULT_CALIBRATION_TRIALS: usize = 20_000;

/// One null replicate: normal errors, fresh design, OLS, standardized
/// residuals, classical D against Φ.
pub(crate) fn null_residual_distance(n: usize, model: &LinearModelSpec, seed: SeedSpec) -> Result<f64> {
    let (y, x) = model.simulate_null(n, seed)?;
    let fit = ols_fit(&y, &x)?;
    let z = fit.standardized_residuals()?;
    ks_statistic(&z, normal_cdf)
}

/// Empirical `(1 − α)` quantile of D over `trials` null replicates.
///
/// Runs in the current rayon pool; the result depends only on the inputs.
/// At `α = 1` every trial exceeds the quantile and the critical value is 0.
pub fn lilliefors_calibrate(
    n: usize,
    alpha: f64,
    model: &LinearModelSpec,
    trials: usize,
    seed: SeedSpec,
) -> Result<f64> {
    if trials < MIN_CALIBRATION_TRIALS {
        return Err(Error::InsufficientTrials {
            given: trials,
            needed: MIN_CALIBRATION_TRIALS,
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain {
            what: "Lilliefors significance level",
            value: alpha,
        });
    }
    model.validate()?;
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let root = seed.fork(n as u64);
    let mut d: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| null_residual_distance(n, model, SeedSpec::new(root.master_seed, t)))
        .collect::<Result<_>>()?;
    d.sort_unstable_by(f64::total_cmp);
    let k = ((1.0 - alpha) * trials as f64).ceil() as usize;
    Ok(if k == 0 { 0.0 } else { d[k - 1] })
}

/// Calibrates every size in `sizes`, consulting and updating `cache` if given.
pub fn calibrate_table(
    sizes: &[usize],
    alpha: f64,
    model: &LinearModelSpec,
    trials: usize,
    seed: SeedSpec,
    mut cache: Option<&mut CalibrationCache>,
) -> Result<KsCriticalTable> {
    let hash = model.design.hash();
    let mut table = KsCriticalTable::new(alpha, trials, seed, hash.clone());
    for &n in sizes {
        let key = CacheKey {
            n,
            alpha,
            design_hash: hash.clone(),
            trials,
            master_seed: seed.master_seed,
        };
        let cached = cache.as_deref().and_then(|c| c.get(&key));
        let critical = match cached {
            Some(v) => v,
            None => {
                let v = lilliefors_calibrate(n, alpha, model, trials, seed)?;
                if let Some(c) = cache.as_deref_mut() {
                    c.insert(key, v);
                }
                v
            }
        };
        table.entries.insert(n, critical);
    }
    if let Some(c) = cache {
        c.save()?;
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheKey {
    pub n: usize,
    pub alpha: f64,
    pub design_hash: String,
    pub trials: usize,
    pub master_seed: u64,
}

/// Line-oriented on-disk store of calibrated criticals.
///
/// Each record is `n alpha design_hash trials master_seed critical`. The
/// file is a cache: unreadable lines are skipped and every value can be
/// recomputed.
#[derive(Debug, Default)]
pub struct CalibrationCache {
    path: Option<PathBuf>,
    records: Vec<(CacheKey, f64)>,
}

impl CalibrationCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut records = Vec::new();
        if path.exists() {
            for line in fs::read_to_string(&path)?.lines() {
                if let Some(r) = parse_record(line) {
                    records.push(r);
                }
            }
        }
        Ok(Self {
            path: Some(path),
            records,
        })
    }

    pub fn get(&self, key: &CacheKey) -> Option<f64> {
        self.records
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
    }

    pub fn insert(&mut self, key: CacheKey, critical: f64) {
        self.records.retain(|(k, _)| k != &key);
        self.records.push((key, critical));
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let mut out = fs::File::create(path)?;
        writeln!(out, "# n alpha design_hash trials master_seed critical")?;
        for (k, v) in &self.records {
            writeln!(
                out,
                "{} {} {} {} {} {}",
                k.n, k.alpha, k.design_hash, k.trials, k.master_seed, v
            )?;
        }
        Ok(())
    }
}

fn parse_record(line: &str) -> Option<(CacheKey, f64)> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return None;
    }
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != 6 {
        return None;
    }
    Some((
        CacheKey {
            n: f[0].parse().ok()?,
            alpha: f[1].parse().ok()?,
            design_hash: f[2].to_string(),
            trials: f[3].parse().ok()?,
            master_seed: f[4].parse().ok()?,
        },
        f[5].parse().ok()?,
    ))
}
