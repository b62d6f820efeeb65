use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Reads one number per line. Blank lines and lines starting with `#` are skipped.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_values(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| anyhow::anyhow!("line {}: `{line}` is not a number", i + 1))?;
        if !v.is_finite() {
            bail!("line {}: `{line}` is not finite", i + 1);
        }
        out.push(v);
    }
    Ok(out)
}
