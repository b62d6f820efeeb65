//! Published power cells beyond the acceptance criteria, at 10,000 trials.

use entest::harness::{bundled_config, run_power_study, PowerStudyConfig};
use entest::kstest::{ks_critical_simple, ks_statistic, KsCriticalRule, KsStatistic};
use entest::numerics::normal_cdf;
use entest::rng::{sample, DistributionSpec, SeedSpec};

fn power(table: &str, label: &str, n: usize) -> f64 {
    power_with(table, label, n, |_| {})
}

fn power_with(table: &str, label: &str, n: usize, tweak: impl FnOnce(&mut PowerStudyConfig)) -> f64 {
    let mut c = bundled_config(table).unwrap().study().unwrap();
    c.alternatives.retain(|a| a.label == label);
    assert_eq!(c.alternatives.len(), 1, "{label}");
    c.sample_sizes = vec![n];
    c.trials = 10_000;
    tweak(&mut c);
    run_power_study(&c).unwrap().rows[0].power
}

fn assert_near(got: f64, want: f64, tol: f64, what: &str) {
    assert!((got - want).abs() <= tol, "{what}: {got} vs {want} ± {tol}");
}

#[test]
fn simple_ks_size_at_three_sizes() {
    for n in [25usize, 100, 1000] {
        let crit = ks_critical_simple(n, 0.05).unwrap();
        let rej = (0..10_000u64)
            .filter(|&t| {
                let x = sample(&DistributionSpec::standard_normal(), n, SeedSpec::new(500 + n as u64, t)).unwrap();
                ks_statistic(&x, normal_cdf).unwrap() > crit
            })
            .count();
        assert_near(rej as f64 / 1e4, 0.05, 0.01, &format!("KS size n={n}"));
    }
}

#[test]
fn et_simple_harness_examples() {
    assert_near(power("a1", "u=0", 1000), 0.051, 0.01, "A1 size n=1000");
    assert_near(power("a1", "u=1", 50), 0.951, 0.02, "A1 u=1 n=50");
    assert_near(power("a3", "Cauchy(0 1)", 50), 0.995, 0.01, "A3 Cauchy n=50");
    assert_near(power("a2", "sigma=1.5", 100), 0.999, 0.01, "A2 sigma=1.5 n=100");
    assert_near(power("a3", "UniformNC", 250), 0.933, 0.02, "A3 UniformNC n=250");
}

#[test]
fn ks_simple_cauchy_example() {
    assert_near(power("a4", "Cauchy(0 1)", 100), 0.813, 0.02, "A4 Cauchy n=100");
    let classical = power_with("a4", "Cauchy(0 1)", 100, |c| {
        c.ks.statistic = KsStatistic::TwoSided;
        c.ks.critical_rule = KsCriticalRule::FiniteSample;
    });
    // The classical statistic with the corrected critical is uniformly more powerful here.
    assert!(classical > 0.85, "{classical}");
}

#[test]
fn regression_et_examples() {
    assert_near(power("a5", "Size N(0 4)", 1000), 0.051, 0.01, "A5 size n=1000");
    assert!(power("a5", "AR(1)", 100) >= 0.99);
    assert_near(power("a5", "MA(0.5 0.25)", 250), 0.891, 0.03, "A5 MA(2) n=250");
    assert_near(power("a5", "AR(1)", 50), 0.962, 0.02, "A5 AR(1) n=50");
}

#[test]
fn regression_ks_examples() {
    assert_near(power("a6", "Size N(0 4)", 1000), 0.052, 0.01, "A6 size n=1000");
    assert_near(power("a6", "Size N(0 4)", 500), 0.047, 0.012, "A6 size n=500");
    assert!(power("a6", "CLogN(0 0.94062)", 100) >= 0.99);
    // The published size at n=100 is 0.037, below alpha; calibrated criticals
    // hold size at 0.05, so this cell is compared as excess over size.
    let size = power("a6", "Size N(0 4)", 100);
    let ar = power("a6", "AR(0.5)", 100);
    assert_near(ar - size, 0.046 - 0.037, 0.015, "A6 AR(0.5) n=100 excess over size");
    assert_near(power("a6", "AR(1)", 1000), 0.993, 0.01, "A6 AR(1) n=1000");
}
