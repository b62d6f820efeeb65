use std::fmt;

/// Outcome of a single hypothesis test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// Test statistic; `f64::INFINITY` marks an infeasible ET constraint.
    pub statistic: f64,
    pub critical_value: f64,
    /// Present when the test has a tractable reference distribution.
    pub p_value: Option<f64>,
    pub reject: bool,
}

impl TestResult {
    /// Reject iff `statistic > critical_value`. An infinite statistic always rejects.
    pub fn from_statistic(statistic: f64, critical_value: f64, p_value: Option<f64>) -> Self {
        Self {
            statistic,
            critical_value,
            p_value,
            reject: statistic > critical_value,
        }
    }
}

impl fmt::Display for TestResult {
    /// `key: value` lines, stable for machine parsing.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "statistic: {}", self.statistic)?;
        writeln!(f, "critical_value: {}", self.critical_value)?;
        match self.p_value {
            Some(p) => writeln!(f, "p_value: {p}")?,
            None => writeln!(f, "p_value: NA")?,
        }
        write!(
            f,
            "decision: {}",
            if self.reject { "reject" } else { "do-not-reject" }
        )
    }
}
