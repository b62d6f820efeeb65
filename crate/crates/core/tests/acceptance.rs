//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Power cells use 10,000 trials.

use std::process::ExitCode;
use std::time::Instant;

use entest::harness::{bundled_config, run_power_study, run_power_study_with_workers, PowerStudyConfig};
use entest::kstest::{ks_statistic, KsCriticalRule, KsStatistic};
use entest::maxent::{et_statistic, et_statistic_of_weights, solve_maxent, ConstraintValues, DEFAULT_TOLERANCE};
use entest::moments::normal_cf_integral;
use entest::numerics::{chi2_1_critical, normal_cdf, normal_quantile};
use entest::regression::{ols_fit, ratio_transform, DesignRule};
use entest::rng::{sample, DistributionSpec, SeedSpec, StreamRng};
use nalgebra::DVector;

const TRIALS: usize = 10_000;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, title: &str, ok: bool, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!("{} [{id}] {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

/// A bundled table restricted to the given alternatives and sizes.
fn restricted(table: &str, labels: &[&str], sizes: &[usize]) -> PowerStudyConfig {
    let mut c = bundled_config(table).unwrap().study().unwrap();
    c.alternatives.retain(|a| labels.contains(&a.label.as_str()));
    assert_eq!(c.alternatives.len(), labels.len(), "labels in {table}");
    c.sample_sizes = sizes.to_vec();
    c.trials = TRIALS;
    c
}

struct Cell {
    table: &'static str,
    label: &'static str,
    n: usize,
    target: f64,
    tol: f64,
}

impl Cell {
    const fn new(table: &'static str, label: &'static str, n: usize, target: f64, tol: f64) -> Self {
        Self {
            table,
            label,
            n,
            target,
            tol,
        }
    }

    /// Runs the cell; returns (pass, power, text).
    fn run(&self) -> (bool, f64, String) {
        let t = run_power_study(&restricted(self.table, &[self.label], &[self.n])).unwrap();
        let p = t.rows[0].power;
        let ok = (p - self.target).abs() <= self.tol + 1e-12;
        (ok, p, format!("{}@{}={p:.4} ({}±{})", self.label, self.n, self.target, self.tol))
    }
}

fn cells(report: &mut Report, id: &str, title: &str, list: &[Cell]) {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in list {
        let (pass, _, text) = c.run();
        ok &= pass;
        parts.push(text);
    }
    report.line(id, title, ok, parts.join(", "));
}

fn criterion_1(report: &mut Report) {
    let start = Instant::now();
    let sizes = [25, 50, 100, 250, 500, 1000];
    let want = [0.088, 0.069, 0.059, 0.053, 0.052, 0.051];
    let t = run_power_study(&restricted("a1", &["u=0"], &sizes)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut ok = secs < 120.0;
    let mut parts = Vec::new();
    for (row, w) in t.rows.iter().zip(want) {
        let pass = (row.power - w).abs() <= 0.012;
        ok &= pass;
        parts.push(format!("n={} {:.4} ({w})", row.n, row.power));
    }
    report.line(
        "1",
        "ET size, N(0,1) null, tol 0.012",
        ok,
        format!("{}; {secs:.1}s (<120s)", parts.join(", ")),
    );
}

fn criterion_4(report: &mut Report) {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in [
        Cell::new("a3", "Cauchy(0 1)", 50, 0.995, 0.01),
        Cell::new("a3", "UniformC", 1000, 0.497, 0.03),
    ] {
        let (pass, _, text) = c.run();
        ok &= pass;
        parts.push(text);
    }
    let (pass, _, text) = Cell::new("a3", "T3", 100, 0.865, 0.03).run();
    parts.push(text);
    if !pass {
        // Fallback for the t rows: power non-decreasing in n within 2 SE.
        let t = run_power_study(&restricted("a3", &["T3"], &[25, 50, 100, 250, 500, 1000])).unwrap();
        let monotone = t
            .rows
            .windows(2)
            .all(|w| w[1].power + 2.0 * (w[0].se.powi(2) + w[1].se.powi(2)).sqrt() >= w[0].power);
        parts.push(format!("T3 fallback monotone={monotone}"));
        ok &= monotone;
    }
    report.line("4", "ET power, non-normal alternatives", ok, parts.join(", "));
}

fn criterion_5(report: &mut Report) {
    let list = [
        Cell::new("a4", "Cauchy(0 1)", 100, 0.813, 0.03),
        Cell::new("a4", "UniformNC", 100, 0.973, 0.02),
        Cell::new("a4", "T3", 500, 0.660, 0.03),
    ];
    cells(report, "5", "KS power (upper-step D, K_alpha/sqrt(n))", &list);
    let mut info = Vec::new();
    for c in &list {
        let mut cfg = restricted(c.table, &[c.label], &[c.n]);
        cfg.ks.statistic = KsStatistic::TwoSided;
        cfg.ks.critical_rule = KsCriticalRule::FiniteSample;
        let p = run_power_study(&cfg).unwrap().rows[0].power;
        info.push(format!("{}@{}={p:.4}", c.label, c.n));
    }
    println!("info [5] classical two-sided D with corrected critical: {}", info.join(", "));
}

fn criterion_7(report: &mut Report) {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in [
        Cell::new("a6", "Size N(0 4)", 500, 0.047, 0.012),
        Cell::new("a6", "AR(0.5)", 250, 0.057, 0.015),
    ] {
        let (pass, _, text) = c.run();
        ok &= pass;
        parts.push(text);
    }
    let (_, p, _) = Cell::new("a6", "Cauchy(0 2/pi)", 100, 1.0, 1.0).run();
    ok &= p >= 0.99;
    parts.push(format!("Cauchy(0 2/pi)@100={p:.4} (>=0.99)"));
    report.line("7", "Regression KS with Lilliefors criticals", ok, parts.join(", "));
}

/// Maximum entropy over weights with `Σ p g = 0`, by lattice search over all
/// coordinates except the largest and smallest g, which are solved exactly,
/// followed by a finer search around the best point.
fn lattice_max_entropy(g: &[f64]) -> f64 {
    let n = g.len();
    let hi = (0..n).max_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
    let lo = (0..n).min_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
    let free: Vec<usize> = (0..n).filter(|&i| i != hi && i != lo).collect();
    let entropy = |w: &[f64]| -> Option<f64> {
        let s: f64 = w.iter().sum();
        let m: f64 = w.iter().zip(&free).map(|(p, &i)| p * g[i]).sum();
        let r = 1.0 - s;
        if r < 0.0 {
            return None;
        }
        let p_hi = (-m - r * g[lo]) / (g[hi] - g[lo]);
        let p_lo = r - p_hi;
        if p_hi < 0.0 || p_lo < 0.0 {
            return None;
        }
        let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
        Some(w.iter().map(|&p| h(p)).sum::<f64>() + h(p_hi) + h(p_lo))
    };
    let search = |center: &[f64], half_width: f64, step: f64| -> (f64, Vec<f64>) {
        let k = (half_width / step).round() as i64;
        let mut best = (f64::NEG_INFINITY, center.to_vec());
        let mut idx = vec![-k; free.len()];
        loop {
            let w: Vec<f64> = center.iter().zip(&idx).map(|(c, &i)| c + i as f64 * step).collect();
            if w.iter().all(|&p| p >= 0.0) {
                if let Some(e) = entropy(&w) {
                    if e > best.0 {
                        best = (e, w);
                    }
                }
            }
            let mut d = 0;
            loop {
                if d == idx.len() {
                    return best;
                }
                idx[d] += 1;
                if idx[d] <= k {
                    break;
                }
                idx[d] = -k;
                d += 1;
            }
        }
    };
    let start = vec![0.5; free.len()];
    let (_, coarse) = search(&start, 0.5, 2e-3);
    let (_, mid) = search(&coarse, 4e-3, 1e-4);
    search(&mid, 2e-4, 5e-6).0
}

fn criterion_8(report: &mut Report) {
    let start = Instant::now();
    let mut checks: Vec<(&str, bool)> = Vec::new();

    // Max-entropy solver vs lattice oracle.
    let mut rng = StreamRng::new(SeedSpec::new(8, 8));
    let mut worst = 0.0f64;
    for n in 2..=4 {
        let mut done = 0;
        while done < 100 {
            let g: Vec<f64> = (0..n).map(|_| 2.0 * rng.uniform_open() - 1.0).collect();
            let has_both = g.iter().any(|&v| v > 0.0) && g.iter().any(|&v| v < 0.0);
            if !has_both {
                continue;
            }
            let sol = solve_maxent(&ConstraintValues::new(g.clone()).unwrap(), DEFAULT_TOLERANCE).unwrap();
            let h: f64 = sol.weights.iter().filter(|&&p| p > 0.0).map(|p| -p * p.ln()).sum();
            worst = worst.max((h - lattice_max_entropy(&g)).abs());
            done += 1;
        }
    }
    checks.push(("maxent lattice oracle", worst < 1e-4));

    let uniform = solve_maxent(&ConstraintValues::new(vec![1.0, -1.0, 2.0, -2.0]).unwrap(), DEFAULT_TOLERANCE).unwrap();
    let skewed = solve_maxent(&ConstraintValues::new(vec![2.0, -1.0]).unwrap(), DEFAULT_TOLERANCE).unwrap();
    checks.push((
        "statistic zero iff uniform",
        et_statistic(&uniform, 4).unwrap().abs() < 1e-12
            && et_statistic(&skewed, 2).unwrap() > 0.1
            && et_statistic_of_weights(&[0.25; 4]) == 0.0,
    ));

    let infeasible = solve_maxent(&ConstraintValues::new(vec![0.5, 1.0, 2.0]).unwrap(), DEFAULT_TOLERANCE).unwrap();
    checks.push((
        "infeasible g",
        !infeasible.is_feasible() && et_statistic(&infeasible, 3).unwrap().is_infinite(),
    ));

    checks.push(("chi2_1 critical", (chi2_1_critical(0.05).unwrap() - 3.841459).abs() < 1e-5));
    checks.push((
        "CF quadrature",
        (normal_cf_integral(0.0, 1.0).unwrap() - 1.7112493).abs() < 1e-6,
    ));

    let quantiles: Vec<f64> = (1..=10).map(|j| normal_quantile((j as f64 - 0.5) / 10.0).unwrap()).collect();
    checks.push((
        "KS golden D",
        ks_statistic(&[0.0], normal_cdf).unwrap() == 0.5
            && (ks_statistic(&quantiles, normal_cdf).unwrap() - 0.05).abs() < 1e-12
            && (ks_statistic(&[-1.0, 0.0, 1.0], normal_cdf).unwrap() - 0.174678).abs() < 1e-6,
    ));

    let rule = DesignRule::InterceptPlusUniform { uniform_columns: 2 };
    let x = rule.generate(40, SeedSpec::new(1, 2)).unwrap();
    let noise = DVector::from_vec(sample(&DistributionSpec::standard_normal(), 40, SeedSpec::new(1, 3)).unwrap());
    let fit = ols_fit(&noise, &x).unwrap();
    let exact = ols_fit(&(&x * DVector::from_vec(vec![1.0, -2.0, 0.5])), &x).unwrap();
    checks.push((
        "OLS leverage sum and perfect fit",
        (fit.hat_diagonal().iter().sum::<f64>() - 3.0).abs() < 1e-8
            && (fit.leverages.iter().sum::<f64>() - 37.0).abs() < 1e-8
            && exact.residuals.iter().all(|e| e.abs() < 1e-12),
    ));

    let scaled: Vec<f64> = fit.residuals.iter().map(|e| -3.7 * e).collect();
    let a = ratio_transform(&fit.residuals).unwrap();
    let b = ratio_transform(&scaled).unwrap();
    checks.push((
        "ratio scale invariance",
        a.iter().zip(&b).all(|(p, q)| (p - q).abs() <= 1e-12 * p.abs().max(1.0)),
    ));

    let mut small = restricted("a3", &["UniformNC", "T3"], &[25, 50]);
    small.trials = 500;
    let w1 = run_power_study_with_workers(&small, 1).unwrap();
    let w2 = run_power_study_with_workers(&small, 2).unwrap();
    let w4 = run_power_study_with_workers(&small, 4).unwrap();
    checks.push(("harness determinism across workers", w1 == w2 && w2 == w4));

    let secs = start.elapsed().as_secs_f64();
    checks.push(("runtime < 30 s", secs < 30.0));
    let ok = checks.iter().all(|c| c.1);
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    report.line(
        "8",
        "Property suite",
        ok,
        format!(
            "{} checks, max entropy gap {worst:.2e}, {secs:.1}s{}",
            checks.len(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failed: {}", failed.join(", "))
            }
        ),
    );
}

fn main() -> ExitCode {
    let mut report = Report { failures: 0 };
    let start = Instant::now();
    criterion_8(&mut report);
    criterion_1(&mut report);
    cells(
        &mut report,
        "2",
        "ET power, mean shift",
        &[Cell::new("a1", "u=0.6", 250, 0.929, 0.02), Cell::new("a1", "u=1", 50, 0.951, 0.02)],
    );
    cells(
        &mut report,
        "3",
        "ET power, scale change",
        &[
            Cell::new("a2", "sigma=1.1", 250, 0.527, 0.03),
            Cell::new("a2", "sigma=1.5", 100, 0.999, 0.01),
        ],
    );
    criterion_4(&mut report);
    criterion_5(&mut report);
    cells(
        &mut report,
        "6",
        "Regression ET on residual ratios",
        &[
            Cell::new("a5", "Size N(0 4)", 1000, 0.051, 0.012),
            Cell::new("a5", "AR(1)", 50, 0.962, 0.02),
            Cell::new("a5", "MA(0.5 0.25)", 250, 0.891, 0.03),
            Cell::new("a5", "CLogN(0 0.94062)", 500, 0.914, 0.03),
        ],
    );
    criterion_7(&mut report);
    println!(
        "acceptance: {} of 8 criteria passed in {:.1}s",
        8 - report.failures,
        start.elapsed().as_secs_f64()
    );
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
