//! Entropy-based goodness-of-fit testing for simple distributional hypotheses.
//!
//! The test maximizes Shannon entropy over probability weights on the sample
//! subject to a single moment condition derived from the hypothesized
//! characteristic function, and refers `2n Σ π ln(nπ)` to a χ²₁ critical
//! value. The crate also carries a Kolmogorov–Smirnov comparator (with
//! Monte Carlo Lilliefors calibration for regression residuals) and a
//! seeded, parallel Monte Carlo engine for power studies.
//!
//! Module map:
//! - [`numerics`]: erf, normal CDF/quantile, χ²₁ tail, adaptive quadrature.
//! - [`rng`]: counter-based seeded streams and the sampling distributions.
//! - [`maxent`]: the exponential-tilt solver, the ET statistic, Cressie–Read divergence.
//! - [`moments`]: characteristic-function moment constraints.
//! - [`kstest`]: KS statistic, critical values, Lilliefors calibration.
//! - [`regression`]: OLS, residual ratio transform, regression ET and KS.
//! - [`harness`]: power studies, CSV/SVG output, config files.

pub mod error;
pub mod harness;
pub mod kstest;
pub mod maxent;
pub mod moments;
pub mod numerics;
pub mod regression;
pub mod rng;

mod result;

pub use error::{Error, Result};
pub use result::TestResult;
