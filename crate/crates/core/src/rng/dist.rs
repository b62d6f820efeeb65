use std::f64::consts::PI;
use std::fmt;

use super::{SeedSpec, StreamRng};
use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, normal_quantile};

/// Stationary AR paths are started from zero and run this long before recording.
const AR_BURN_IN: usize = 100;

/// A sampling distribution or error process.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    Normal { mean: f64, sd: f64 },
    Uniform { low: f64, high: f64 },
    /// `shift + Exp(rate)`.
    Exponential { rate: f64, shift: f64 },
    Cauchy { loc: f64, scale: f64 },
    /// `scale · t(dof)`.
    StudentT { dof: u32, scale: f64 },
    /// `exp(√v · N(0,1)) − exp(v/2)`: a lognormal with log-location 0 and
    /// log-variance `v`, translated to mean zero.
    CenteredLogNormal { log_variance: f64 },
    /// `x_t = Σ ρ_i x_{t−i} + ε_t`.
    Ar {
        coefficients: Vec<f64>,
        innovation: Box<DistributionSpec>,
    },
    /// `x_t = ε_t + Σ θ_i ε_{t−i}`.
    Ma {
        coefficients: Vec<f64>,
        innovation: Box<DistributionSpec>,
    },
}

impl DistributionSpec {
    /// Uniform with mean 0 and variance 1.
    pub fn uniform_centered() -> Self {
        let h = 3f64.sqrt();
        Self::Uniform { low: -h, high: h }
    }

    /// Uniform with mean 0.5 and variance 1.
    pub fn uniform_noncentered() -> Self {
        let h = 3f64.sqrt();
        Self::Uniform {
            low: 0.5 - h,
            high: 0.5 + h,
        }
    }

    /// Exp(1) translated to mean 0.
    pub fn exponential_centered() -> Self {
        Self::Exponential {
            rate: 1.0,
            shift: -1.0,
        }
    }

    /// Exp(1), mean and standard deviation 1.
    pub fn exponential_noncentered() -> Self {
        Self::Exponential {
            rate: 1.0,
            shift: 0.0,
        }
    }

    pub fn standard_normal() -> Self {
        Self::Normal { mean: 0.0, sd: 1.0 }
    }

    pub fn is_process(&self) -> bool {
        matches!(self, Self::Ar { .. } | Self::Ma { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDistribution(msg));
        let finite = |v: f64, name: &str| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidDistribution(format!("{name} must be finite, got {v}")))
            }
        };
        match self {
            Self::Normal { mean, sd } => {
                finite(*mean, "normal mean")?;
                if !(*sd > 0.0 && sd.is_finite()) {
                    return bad(format!("normal sd must be positive, got {sd}"));
                }
            }
            Self::Uniform { low, high } => {
                finite(*low, "uniform low")?;
                finite(*high, "uniform high")?;
                if low.is_nan() || high.is_nan() || low >= high {
                    return bad(format!("uniform needs low < high, got [{low}, {high}]"));
                }
            }
            Self::Exponential { rate, shift } => {
                finite(*shift, "exponential shift")?;
                if !(*rate > 0.0 && rate.is_finite()) {
                    return bad(format!("exponential rate must be positive, got {rate}"));
                }
            }
            Self::Cauchy { loc, scale } => {
                finite(*loc, "cauchy location")?;
                if !(*scale > 0.0 && scale.is_finite()) {
                    return bad(format!("cauchy scale must be positive, got {scale}"));
                }
            }
            Self::StudentT { dof, scale } => {
                if *dof < 2 {
                    return bad(format!("t degrees of freedom must be at least 2, got {dof}"));
                }
                if !(*scale > 0.0 && scale.is_finite()) {
                    return bad(format!("t scale must be positive, got {scale}"));
                }
            }
            Self::CenteredLogNormal { log_variance } => {
                if !(*log_variance > 0.0 && log_variance.is_finite()) {
                    return bad(format!("log-variance must be positive, got {log_variance}"));
                }
            }
            Self::Ar {
                coefficients,
                innovation,
            }
            | Self::Ma {
                coefficients,
                innovation,
            } => {
                if coefficients.is_empty() {
                    return bad("process coefficient list is empty".into());
                }
                for c in coefficients {
                    finite(*c, "process coefficient")?;
                }
                if innovation.is_process() {
                    return bad("process innovations must be iid".into());
                }
                innovation.validate()?;
            }
        }
        Ok(())
    }
}

/// Draws `n` values. Deterministic in `seed`; iid except for AR/MA tags,
/// which return one serially dependent path.
pub fn sample(spec: &DistributionSpec, n: usize, seed: SeedSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::TooFewObservations { given: 0, needed: 1 });
    }
    Ok(sample_unchecked(spec, n, seed))
}

fn sample_unchecked(spec: &DistributionSpec, n: usize, seed: SeedSpec) -> Vec<f64> {
    use DistributionSpec::*;
    let mut rng = StreamRng::new(seed);
    match spec {
        Normal { mean, sd } => (0..n).map(|_| mean + sd * std_normal(&mut rng)).collect(),
        Uniform { low, high } => (0..n)
            .map(|_| low + (high - low) * rng.uniform_open())
            .collect(),
        Exponential { rate, shift } => (0..n)
            .map(|_| shift - rng.uniform_open().ln() / rate)
            .collect(),
        Cauchy { loc, scale } => (0..n)
            .map(|_| loc + scale * (PI * (rng.uniform_open() - 0.5)).tan())
            .collect(),
        StudentT { dof, scale } => {
            let mut chi_rng = StreamRng::new(seed.substream(1));
            (0..n)
                .map(|_| {
                    let z = std_normal(&mut rng);
                    let chi2: f64 = (0..*dof)
                        .map(|_| {
                            let w = std_normal(&mut chi_rng);
                            w * w
                        })
                        .sum();
                    scale * z / (chi2 / *dof as f64).sqrt()
                })
                .collect()
        }
        CenteredLogNormal { log_variance } => {
            let s = log_variance.sqrt();
            let shift = (0.5 * log_variance).exp();
            (0..n).map(|_| (s * std_normal(&mut rng)).exp() - shift).collect()
        }
        Ar {
            coefficients,
            innovation,
        } => {
            let stationary = coefficients.iter().map(|c| c.abs()).sum::<f64>() < 1.0;
            let burn = if stationary { AR_BURN_IN } else { 0 };
            let eps = sample_unchecked(innovation, n + burn, seed.substream(2));
            let mut path = Vec::with_capacity(n + burn);
            for (t, e) in eps.iter().enumerate() {
                let mut x = *e;
                for (lag, rho) in coefficients.iter().enumerate() {
                    if t > lag {
                        x += rho * path[t - 1 - lag];
                    }
                }
                path.push(x);
            }
            path.split_off(burn)
        }
        Ma {
            coefficients,
            innovation,
        } => {
            let q = coefficients.len();
            let eps = sample_unchecked(innovation, n + q, seed.substream(2));
            (q..n + q)
                .map(|t| {
                    eps[t]
                        + coefficients
                            .iter()
                            .enumerate()
                            .map(|(i, th)| th * eps[t - 1 - i])
                            .sum::<f64>()
                })
                .collect()
        }
    }
}

fn std_normal(rng: &mut StreamRng) -> f64 {
    normal_quantile(rng.uniform_open()).expect("open-interval uniform")
}

/// CDF of an iid tag at `x`.
pub fn cdf(spec: &DistributionSpec, x: f64) -> Result<f64> {
    use DistributionSpec::*;
    spec.validate()?;
    Ok(match spec {
        Normal { mean, sd } => normal_cdf((x - mean) / sd),
        Uniform { low, high } => ((x - low) / (high - low)).clamp(0.0, 1.0),
        Exponential { rate, shift } => {
            if x <= *shift {
                0.0
            } else {
                -(-(x - shift) * rate).exp_m1()
            }
        }
        Cauchy { loc, scale } => 0.5 + ((x - loc) / scale).atan() / PI,
        StudentT { dof, scale } => student_t_cdf(x / scale, *dof),
        CenteredLogNormal { log_variance } => {
            let y = x + (0.5 * log_variance).exp();
            if y <= 0.0 {
                0.0
            } else {
                normal_cdf(y.ln() / log_variance.sqrt())
            }
        }
        Ar { .. } | Ma { .. } => return Err(Error::ProcessHasNoCdf(spec.to_string())),
    })
}

/// Student-t CDF for integer degrees of freedom via the finite
/// trigonometric series in θ = atan(t/√ν).
fn student_t_cdf(t: f64, dof: u32) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let nu = dof as f64;
    let theta = (t / nu.sqrt()).atan();
    let (s, c) = theta.sin_cos();
    let c2 = c * c;
    // a = P(|T| < |t|) with the sign of t.
    let a = if dof % 2 == 1 {
        let mut term = 1.0;
        let mut sum = 1.0;
        // dof ≥ 3 here; validation rejects dof < 2.
        for k in 1..=(dof as usize - 3) / 2 {
            term *= c2 * (2 * k) as f64 / (2 * k + 1) as f64;
            sum += term;
        }
        2.0 / PI * (theta + s * c * sum)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1;
        while 2 * k <= dof as usize - 2 {
            term *= c2 * (2 * k - 1) as f64 / (2 * k) as f64;
            sum += term;
            k += 1;
        }
        s * sum
    };
    0.5 * (1.0 + a)
}

/// Parameters of the mean-zero lognormal whose variance is `target_variance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenteredLogNormalParams {
    pub log_variance: f64,
    /// Mean of the uncentred lognormal, `exp(log_variance / 2)`.
    pub shift: f64,
}

/// Solves `(e^v − 1)·e^v = target_variance` for the log-variance `v`.
pub fn centered_lognormal_params(target_variance: f64) -> Result<CenteredLogNormalParams> {
    if !(target_variance > 0.0 && target_variance.is_finite()) {
        return Err(Error::Domain {
            what: "lognormal target variance",
            value: target_variance,
        });
    }
    // e^v = (1 + √(1+4s))/2, written to stay accurate as s → 0.
    let root = (1.0 + 4.0 * target_variance).sqrt();
    let log_variance = (2.0 * target_variance / (root + 1.0)).ln_1p();
    Ok(CenteredLogNormalParams {
        log_variance,
        shift: (0.5 * log_variance).exp(),
    })
}

impl fmt::Display for DistributionSpec {
    /// Canonical text form, accepted back by `str::parse`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DistributionSpec::*;
        let list = |c: &[f64]| {
            c.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            Normal { mean, sd } => write!(f, "normal({mean}, {sd})"),
            Uniform { low, high } => write!(f, "uniform({low}, {high})"),
            Exponential { rate, shift } => write!(f, "exponential({rate}, {shift})"),
            Cauchy { loc, scale } => write!(f, "cauchy({loc}, {scale})"),
            StudentT { dof, scale } => write!(f, "t({dof}, {scale})"),
            CenteredLogNormal { log_variance } => write!(f, "clognormal({log_variance})"),
            Ar {
                coefficients,
                innovation,
            } => write!(f, "ar([{}], {innovation})", list(coefficients)),
            Ma {
                coefficients,
                innovation,
            } => write!(f, "ma([{}], {innovation})", list(coefficients)),
        }
    }
}
