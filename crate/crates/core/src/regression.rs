//! Linear-model residual tests.
//!
//! For `y = Xβ + ε` with OLS residuals `e = (I − X(X'X)⁻¹X')ε`, the ratios of
//! consecutive non-overlapping residual pairs are close to iid Cauchy(0, 1)
//! under normal errors, whatever σ². The ET variant tests those ratios with
//! the constraint `Σ π sin(z) = 0`; the KS variant tests leverage-standardized
//! residuals against N(0, 1) with Monte Carlo calibrated critical values.
//!
//! Leverage convention: here `h_j = 1 − H_jj`, where `H = X(X'X)⁻¹X'` is the
//! hat matrix, so that `Var(e_j) = σ² h_j`. This is the complement of the
//! textbook leverage. [`OlsFit::hat_diagonal`] returns `H_jj` itself.

use nalgebra::{DMatrix, DVector};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kstest::{ks_statistic, KsCriticalTable};
use crate::moments::{build_cauchy_sin_constraint, run_et_test};
use crate::numerics::normal_cdf;
use crate::rng::{sample, DistributionSpec, SeedSpec};
use crate::TestResult;

/// Substream tag for design-matrix draws, kept apart from the error draws.
const DESIGN_STREAM: u64 = 3;

/// Pivots below this fraction of the largest |R_ii| count as rank loss.
const RANK_TOLERANCE: f64 = 1e-10;

/// How the n×k design matrix is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignRule {
    /// A column of ones followed by `uniform_columns` columns of Uniform(0, 1).
    InterceptPlusUniform { uniform_columns: usize },
}

impl DesignRule {
    pub fn columns(&self) -> usize {
        match self {
            DesignRule::InterceptPlusUniform { uniform_columns } => 1 + uniform_columns,
        }
    }

    /// Draws the design for one trial. Deterministic in `seed`.
    pub fn generate(&self, n: usize, seed: SeedSpec) -> Result<DMatrix<f64>> {
        match *self {
            DesignRule::InterceptPlusUniform { uniform_columns } => {
                let mut x = DMatrix::from_element(n, 1 + uniform_columns, 1.0);
                if uniform_columns > 0 {
                    let u = sample(
                        &DistributionSpec::Uniform { low: 0.0, high: 1.0 },
                        n * uniform_columns,
                        seed.substream(DESIGN_STREAM),
                    )?;
                    for c in 0..uniform_columns {
                        for r in 0..n {
                            x[(r, c + 1)] = u[c * n + r];
                        }
                    }
                }
                Ok(x)
            }
        }
    }

    /// Short stable digest identifying the rule, for calibration caching.
    pub fn hash(&self) -> String {
        let text = match self {
            DesignRule::InterceptPlusUniform { uniform_columns } => {
                format!("intercept+uniform01x{uniform_columns}")
            }
        };
        let digest = Sha256::digest(text.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `y = Xβ + ε` with a generated design.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModelSpec {
    pub beta: Vec<f64>,
    pub sigma2: f64,
    pub design: DesignRule,
    pub error_process: DistributionSpec,
}

impl LinearModelSpec {
    /// β = (1, 5)', σ² = 4, intercept plus one Uniform(0, 1) column, N(0, 4) errors.
    pub fn simulation_default() -> Self {
        Self {
            beta: vec![1.0, 5.0],
            sigma2: 4.0,
            design: DesignRule::InterceptPlusUniform { uniform_columns: 1 },
            error_process: DistributionSpec::Normal { mean: 0.0, sd: 2.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.design.columns();
        if self.beta.len() != k {
            return Err(Error::LengthMismatch {
                left: self.beta.len(),
                right: k,
            });
        }
        if let Some(index) = self.beta.iter().position(|b| !b.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::Domain {
                what: "error variance",
                value: self.sigma2,
            });
        }
        self.error_process.validate()
    }

    /// Draws `(y, X)` with errors from `errors`.
    pub fn simulate_with(
        &self,
        n: usize,
        errors: &DistributionSpec,
        seed: SeedSpec,
    ) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let x = self.design.generate(n, seed)?;
        let eps = sample(errors, n, seed)?;
        let y = &x * DVector::from_column_slice(&self.beta) + DVector::from_vec(eps);
        Ok((y, x))
    }

    /// Draws `(y, X)` from the model's own error process.
    pub fn simulate(&self, n: usize, seed: SeedSpec) -> Result<(DVector<f64>, DMatrix<f64>)> {
        self.simulate_with(n, &self.error_process, seed)
    }

    /// Draws `(y, X)` with N(0, σ²) errors.
    pub fn simulate_null(&self, n: usize, seed: SeedSpec) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let errors = DistributionSpec::Normal {
            mean: 0.0,
            sd: self.sigma2.sqrt(),
        };
        self.simulate_with(n, &errors, seed)
    }
}

/// Result of an OLS fit.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta_hat: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `h_j = 1 − H_jj`; see the module docs.
    pub leverages: Vec<f64>,
    /// `e'e / (n − k)`.
    pub sigma2_hat: f64,
}

impl OlsFit {
    /// Diagonal of the hat matrix, `1 − h_j`.
    pub fn hat_diagonal(&self) -> Vec<f64> {
        self.leverages.iter().map(|h| 1.0 - h).collect()
    }

    /// `e_j / √(σ̂² h_j)`.
    pub fn standardized_residuals(&self) -> Result<Vec<f64>> {
        if self.sigma2_hat.is_nan() || self.sigma2_hat <= 0.0 {
            return Err(Error::Domain {
                what: "residual variance estimate",
                value: self.sigma2_hat,
            });
        }
        self.residuals
            .iter()
            .zip(&self.leverages)
            .enumerate()
            .map(|(index, (e, h))| {
                if *h > 0.0 {
                    Ok(e / (self.sigma2_hat * h).sqrt())
                } else {
                    Err(Error::DegenerateRatio { index })
                }
            })
            .collect()
    }
}

/// Least squares via Householder QR. Residuals are formed as `y − QQ'y`.
pub fn ols_fit(y: &DVector<f64>, x: &DMatrix<f64>) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if y.len() != n {
        return Err(Error::LengthMismatch { left: y.len(), right: n });
    }
    if k == 0 || n <= k {
        return Err(Error::TooFewRows { rows: n, cols: k });
    }
    if let Some(index) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain {
            what: "design matrix entry",
            value: f64::NAN,
        });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let q = qr.q();
    let scale = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    for i in 0..k {
        let pivot = r[(i, i)].abs();
        if pivot.is_nan() || pivot <= RANK_TOLERANCE * scale {
            return Err(Error::RankDeficient { column: i, pivot });
        }
    }
    let qty = q.transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(Error::RankDeficient { column: k - 1, pivot: 0.0 })?;
    let e = y - &q * &qty;
    let leverages = (0..n)
        .map(|j| 1.0 - q.row(j).iter().map(|v| v * v).sum::<f64>())
        .collect();
    let sigma2_hat = e.dot(&e) / (n - k) as f64;
    Ok(OlsFit {
        beta_hat: beta.iter().copied().collect(),
        residuals: e.iter().copied().collect(),
        leverages,
        sigma2_hat,
    })
}

/// `(e₁/e₂, e₃/e₄, …)`; an odd trailing residual is dropped.
pub fn ratio_transform(e: &[f64]) -> Result<Vec<f64>> {
    if e.len() < 2 {
        return Err(Error::TooFewObservations {
            given: e.len(),
            needed: 2,
        });
    }
    e.chunks_exact(2)
        .enumerate()
        .map(|(i, pair)| {
            if pair[1] == 0.0 {
                Err(Error::DegenerateRatio { index: 2 * i + 1 })
            } else {
                Ok(pair[0] / pair[1])
            }
        })
        .collect()
}

/// OLS, residual ratios, then ET with the sin constraint. The statistic
/// multiplier is the number of pairs.
pub fn run_regression_et(y: &DVector<f64>, x: &DMatrix<f64>, alpha: f64) -> Result<TestResult> {
    if y.len() < 4 {
        return Err(Error::TooFewObservations {
            given: y.len(),
            needed: 4,
        });
    }
    let fit = ols_fit(y, x)?;
    let z = ratio_transform(&fit.residuals)?;
    run_et_test(&z, &build_cauchy_sin_constraint(), alpha)
}

/// KS on standardized residuals against N(0, 1) with a calibrated critical value.
pub fn run_regression_ks(
    y: &DVector<f64>,
    x: &DMatrix<f64>,
    alpha: f64,
    table: &KsCriticalTable,
) -> Result<TestResult> {
    let n = y.len();
    if table.alpha != alpha {
        return Err(Error::MissingCalibration { n, alpha });
    }
    let critical = table.critical(n)?;
    let fit = ols_fit(y, x)?;
    let d = ks_statistic(&fit.standardized_residuals()?, normal_cdf)?;
    Ok(TestResult::from_statistic(d, critical, None))
}
