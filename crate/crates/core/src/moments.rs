//! Moment constraints `g(z) = k(z) − c` built from hypothesized
//! characteristic functions.
//!
//! Integrating `Σ π_j e^{itz_j} = φ(it)` over `t ∈ (−1, 1)` leaves the
//! single real condition `Σ π_j · 2 sin(z_j)/z_j = ∫₋₁¹ φ(it) dt` for any
//! null whose CF is real on that interval. The regression variant uses the
//! integrated derivative condition `Σ π_j sin(z_j) = 0` for a Cauchy(0,1)
//! null.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::maxent::{et_statistic, solve_maxent, ConstraintValues, DEFAULT_TOLERANCE};
use crate::numerics::{chi2_1_critical, chi2_1_sf, integrate, normal_cdf, QuadratureSpec};
use crate::TestResult;

type Kernel = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Per-observation kernel `k` and target constant `c`; `g(z) = k(z) − c`.
#[derive(Clone)]
pub struct MomentConstraint {
    kernel: Kernel,
    target: f64,
    label: String,
}

impl MomentConstraint {
    pub fn new<F>(kernel: F, target: f64, label: impl Into<String>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !target.is_finite() {
            return Err(Error::Domain {
                what: "constraint target",
                value: target,
            });
        }
        Ok(Self {
            kernel: Arc::new(kernel),
            target,
            label: label.into(),
        })
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kernel(&self, z: f64) -> f64 {
        (self.kernel)(z)
    }

    /// `g(z) = k(z) − c`.
    pub fn evaluate(&self, z: f64) -> f64 {
        (self.kernel)(z) - self.target
    }

    pub fn values(&self, data: &[f64]) -> Result<ConstraintValues> {
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        ConstraintValues::new(data.iter().map(|&z| self.evaluate(z)).collect())
    }
}

impl fmt::Debug for MomentConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentConstraint")
            .field("label", &self.label)
            .field("target", &self.target)
            .finish_non_exhaustive()
    }
}

/// `2 sin(z)/z`, with the value 2 at the origin.
pub fn sinc_kernel(z: f64) -> f64 {
    if z.abs() < 1e-6 {
        // Two-term Taylor expansion; the next term is below 1e-25.
        2.0 * (1.0 - z * z / 6.0)
    } else {
        2.0 * z.sin() / z
    }
}

/// `∫₋₁¹ φ(it) dt` for a CF that is real on `[−1, 1]`.
pub fn cf_line_integral<F: Fn(f64) -> f64>(cf: F) -> Result<f64> {
    integrate(cf, -1.0, 1.0, &QuadratureSpec::default())
}

/// `∫₋₁¹ cos(tμ) e^{−σ²t²/2} dt`, the real part of the N(μ, σ²) CF integral.
/// The imaginary part is odd in t and integrates to zero.
pub fn normal_cf_integral(mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) || !mu.is_finite() {
        return Err(Error::Domain {
            what: "normal CF parameters",
            value: if mu.is_finite() { sigma } else { mu },
        });
    }
    // The integrand is even; with s = σt the Gaussian factor has unit width,
    // so a narrow spike at t = 0 for large σ is not missed between nodes.
    // Beyond s = 40 the integrand is below e^{-800}.
    let upper = sigma.min(40.0);
    let half = integrate(
        |s| (s * mu / sigma).cos() * (-0.5 * s * s).exp(),
        0.0,
        upper,
        &QuadratureSpec::default(),
    )?;
    Ok(2.0 * half / sigma)
}

/// `∫₋₁¹ e^{−|t|} dt = 2(1 − e^{−1})`, the standard Cauchy CF integral.
pub fn cauchy_cf_integral() -> Result<f64> {
    cf_line_integral(|t: f64| (-t.abs()).exp())
}

/// Generic constraint for a standardized null with a real CF: kernel
/// `2 sin(z)/z`, target `∫₋₁¹ φ(it) dt`.
pub fn cf_constraint(cf_integral: f64, label: impl Into<String>) -> Result<MomentConstraint> {
    MomentConstraint::new(sinc_kernel, cf_integral, label)
}

/// Constraint for H₀: z ~ N(0, 1).
pub fn build_standard_normal_constraint() -> MomentConstraint {
    let target = normal_cf_integral(0.0, 1.0).expect("standard normal CF integral converges");
    cf_constraint(target, "2 sin(z)/z vs N(0,1)").expect("finite target")
}

/// Constraint for H₀: z ~ Cauchy(0, 1) with the same sinc kernel.
pub fn build_standard_cauchy_constraint() -> MomentConstraint {
    let target = cauchy_cf_integral().expect("Cauchy CF integral converges");
    cf_constraint(target, "2 sin(z)/z vs Cauchy(0,1)").expect("finite target")
}

/// `Σ π_j sin(z_j) = 0`: the Cauchy(0,1) derivative-of-CF condition used on
/// residual ratios.
pub fn build_cauchy_sin_constraint() -> MomentConstraint {
    MomentConstraint::new(f64::sin, 0.0, "sin(z) vs Cauchy(0,1)").expect("finite target")
}

/// Elementwise `(z − μ)/σ`.
pub fn standardize(data: &[f64], mu: f64, sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain {
            what: "standardization sigma",
            value: sigma,
        });
    }
    Ok(data.iter().map(|z| (z - mu) / sigma).collect())
}

/// Rejects when the ET statistic of `z` under `constraint` exceeds the χ²₁
/// critical value. `z` must already be on the constraint's scale.
pub fn run_et_test(z: &[f64], constraint: &MomentConstraint, alpha: f64) -> Result<TestResult> {
    if z.len() < 2 {
        return Err(Error::TooFewObservations {
            given: z.len(),
            needed: 2,
        });
    }
    let critical = chi2_1_critical(alpha)?;
    let g = constraint.values(z)?;
    let solution = solve_maxent(&g, DEFAULT_TOLERANCE)?;
    let statistic = et_statistic(&solution, z.len())?;
    Ok(TestResult::from_statistic(statistic, critical, Some(chi2_1_sf(statistic)?)))
}

/// A fully specified null for a univariate sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimpleNull {
    Normal { mu: f64, sigma: f64 },
    Cauchy { loc: f64, scale: f64 },
    /// Standardize by `(mu, sigma)` and compare against a user-supplied
    /// `∫₋₁¹ φ(it) dt`. No CDF is implied, so only ET applies.
    CustomCf { mu: f64, sigma: f64, cf_integral: f64 },
}

impl SimpleNull {
    pub fn constraint(&self) -> Result<MomentConstraint> {
        match *self {
            SimpleNull::Normal { .. } => Ok(build_standard_normal_constraint()),
            SimpleNull::Cauchy { .. } => Ok(build_standard_cauchy_constraint()),
            SimpleNull::CustomCf { cf_integral, .. } => cf_constraint(cf_integral, "2 sin(z)/z vs custom CF"),
        }
    }

    pub fn standardize(&self, data: &[f64]) -> Result<Vec<f64>> {
        match *self {
            SimpleNull::Normal { mu, sigma } | SimpleNull::CustomCf { mu, sigma, .. } => {
                standardize(data, mu, sigma)
            }
            SimpleNull::Cauchy { loc, scale } => standardize(data, loc, scale),
        }
    }

    /// CDF of the standardized null, if one exists.
    pub fn standard_cdf(&self) -> Option<fn(f64) -> f64> {
        match self {
            SimpleNull::Normal { .. } => Some(normal_cdf),
            SimpleNull::Cauchy { .. } => Some(|z| 0.5 + z.atan() / std::f64::consts::PI),
            SimpleNull::CustomCf { .. } => None,
        }
    }

    /// Standardizes `data` and runs [`run_et_test`].
    pub fn et_test(&self, data: &[f64], alpha: f64) -> Result<TestResult> {
        run_et_test(&self.standardize(data)?, &self.constraint()?, alpha)
    }
}
