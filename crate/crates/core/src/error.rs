use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("{0} is a serially dependent process and has no marginal CDF here")]
    ProcessHasNoCdf(String),

    #[error("data is empty")]
    EmptyData,

    #[error("need at least {needed} observations, got {given}")]
    TooFewObservations { given: usize, needed: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("probability vector invalid: {0}")]
    InvalidProbabilities(String),

    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    #[error("design matrix is rank deficient (column {column}, |R_jj| = {pivot:e})")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("design has {rows} rows but needs more than {cols} columns")]
    TooFewRows { rows: usize, cols: usize },

    #[error("zero denominator in residual ratio pair starting at index {index}")]
    DegenerateRatio { index: usize },

    #[error("no Lilliefors critical value for n = {n}, alpha = {alpha}; run calibration first")]
    MissingCalibration { n: usize, alpha: f64 },

    #[error("calibration table not monotone: D({n_small}) = {d_small} < D({n_large}) = {d_large}")]
    NonMonotoneTable {
        n_small: usize,
        d_small: f64,
        n_large: usize,
        d_large: f64,
    },

    #[error("need at least {needed} trials, got {given}")]
    InsufficientTrials { given: usize, needed: usize },

    #[error("{failures} of {trials} trials failed numerically (limit 0.1%); first failure: {first}")]
    TrialFailures {
        failures: usize,
        trials: usize,
        first: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
