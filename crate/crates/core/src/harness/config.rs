//! Flat `key = value` study configuration.
//!
//! ```text
//! # comment
//! test = et-simple
//! null = normal(0, 1)
//! alternatives = u=0: normal(0, 1), u=0.2: normal(0.2, 1)
//! sample_sizes = 25, 50, 100
//! alpha = 0.05
//! trials = 10000
//! master_seed = 1
//! ```
//!
//! Regression tests take `beta`, `sigma2` and `uniform_columns` instead of
//! `null`. KS studies accept `ks_statistic` (two-sided, upper-step),
//! `ks_critical` (finite-sample, asymptotic), `calibration_trials` and
//! `calibration_cache`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use super::{Alternative, KsOptions, NullSpec, PowerStudyConfig, TestKind, DEFAULT_TRIALS};
use crate::error::{Error, Result};
use crate::kstest::{KsCriticalRule, KsStatistic};
use crate::moments::SimpleNull;
use crate::regression::{DesignRule, LinearModelSpec};
use crate::rng::DistributionSpec;

const KEYS: &[&str] = &[
    "test",
    "null",
    "beta",
    "sigma2",
    "uniform_columns",
    "alternatives",
    "sample_sizes",
    "alpha",
    "trials",
    "master_seed",
    "ks_statistic",
    "ks_critical",
    "calibration_trials",
    "calibration_cache",
];

pub fn parse_config(text: &str) -> Result<PowerStudyConfig> {
    let mut fields: BTreeMap<&str, String> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("unknown key `{key}`"),
            });
        };
        if fields.insert(known, value.trim().to_string()).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("duplicate key `{key}`"),
            });
        }
    }

    let get = |k: &str| fields.get(k).map(String::as_str);
    let required = |k: &str| get(k).ok_or_else(|| Error::Config(format!("{k}: missing")));

    let test: TestKind = required("test")?.parse()?;
    let null = if test.is_regression() {
        if get("null").is_some() {
            return Err(Error::Config(
                "null: regression tests take beta, sigma2 and uniform_columns instead".into(),
            ));
        }
        let mut model = LinearModelSpec::simulation_default();
        if let Some(v) = get("uniform_columns") {
            model.design = DesignRule::InterceptPlusUniform {
                uniform_columns: number("uniform_columns", v)?,
            };
        }
        if let Some(v) = get("beta") {
            model.beta = split_top_level(v)
                .iter()
                .map(|b| number("beta", b))
                .collect::<Result<_>>()?;
        }
        if let Some(v) = get("sigma2") {
            model.sigma2 = number("sigma2", v)?;
        }
        model.error_process = DistributionSpec::Normal {
            mean: 0.0,
            sd: model.sigma2.sqrt(),
        };
        NullSpec::Regression(model)
    } else {
        for k in ["beta", "sigma2", "uniform_columns"] {
            if get(k).is_some() {
                return Err(Error::Config(format!("{k}: only valid for regression tests")));
            }
        }
        NullSpec::Simple(simple_null(required("null")?)?)
    };

    let alternatives = split_top_level(required("alternatives")?)
        .into_iter()
        .map(alternative)
        .collect::<Result<Vec<_>>>()?;
    let sample_sizes = split_top_level(required("sample_sizes")?)
        .iter()
        .map(|s| number("sample_sizes", s))
        .collect::<Result<Vec<usize>>>()?;

    let mut ks = KsOptions::default();
    if let Some(v) = get("ks_statistic") {
        ks.statistic = match v {
            "two-sided" => KsStatistic::TwoSided,
            "upper-step" => KsStatistic::UpperStep,
            _ => return Err(Error::Config(format!("ks_statistic: `{v}` is not two-sided or upper-step"))),
        };
    }
    if let Some(v) = get("ks_critical") {
        ks.critical_rule = match v {
            "finite-sample" => KsCriticalRule::FiniteSample,
            "asymptotic" => KsCriticalRule::Asymptotic,
            _ => return Err(Error::Config(format!("ks_critical: `{v}` is not finite-sample or asymptotic"))),
        };
    }
    if let Some(v) = get("calibration_trials") {
        ks.calibration_trials = number("calibration_trials", v)?;
    }
    if let Some(v) = get("calibration_cache") {
        ks.calibration_cache = Some(PathBuf::from(v));
    }

    let config = PowerStudyConfig {
        test,
        null,
        alternatives,
        sample_sizes,
        alpha: get("alpha").map_or(Ok(0.05), |v| number("alpha", v))?,
        trials: get("trials").map_or(Ok(DEFAULT_TRIALS), |v| number("trials", v))?,
        master_seed: get("master_seed").map_or(Ok(0), |v| number("master_seed", v))?,
        ks,
    };
    config.validate()?;
    Ok(config)
}

fn number<T: std::str::FromStr>(field: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{field}: `{}` is not a valid number", v.trim())))
}

fn simple_null(v: &str) -> Result<SimpleNull> {
    let spec: DistributionSpec = v.parse().map_err(|e| Error::Config(format!("null: {e}")))?;
    match spec {
        DistributionSpec::Normal { mean, sd } => Ok(SimpleNull::Normal { mu: mean, sigma: sd }),
        DistributionSpec::Cauchy { loc, scale } => Ok(SimpleNull::Cauchy { loc, scale }),
        other => Err(Error::Config(format!("null: {other} is not a supported simple null (normal or cauchy)"))),
    }
}

fn alternative(item: &str) -> Result<Alternative> {
    let (label, spec_text) = match split_label(item) {
        Some((l, s)) => (l.trim().to_string(), s),
        None => (item.trim().to_string(), item),
    };
    if label.is_empty() {
        return Err(Error::Config(format!("alternatives: empty label in `{item}`")));
    }
    let spec = spec_text
        .parse()
        .map_err(|e| Error::Config(format!("alternatives: {label}: {e}")))?;
    Ok(Alternative { label, spec })
}

/// `label: spec`, with the colon outside any brackets.
fn split_label(item: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in item.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ':' if depth == 0 => return Some((&item[..i], &item[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Splits on commas that are not inside parentheses or brackets.
fn split_top_level(v: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in v.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(v[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(v[start..].trim());
    out.retain(|s| !s.is_empty());
    out
}
