//! Maximum-entropy weights under one moment condition.
//!
//! For constraint values `g_j` the problem
//!
//! ```text
//! max  −Σ π_j ln π_j   s.t.  Σ π_j g_j = 0,  Σ π_j = 1
//! ```
//!
//! has the exponential-tilt solution `π_j(λ) = e^{−λ g_j} / Σ_k e^{−λ g_k}`,
//! with λ the root of the dual derivative `m(λ) = Σ π_j(λ) g_j`. `m` is
//! strictly decreasing (`m'(λ) = −Var_π(g)`), so a bracketed safeguarded
//! Newton iteration finds the root. The normalization multiplier never
//! appears explicitly; it is absorbed into the partition function.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;
const FEASIBILITY_MARGIN: f64 = 1e-14;
/// Default convergence target for `|Σ π g|`, relative to `max |g|`.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Per-observation constraint values `g(z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintValues(Vec<f64>);

impl ConstraintValues {
    pub fn new(g: Vec<f64>) -> Result<Self> {
        if g.len() < 2 {
            return Err(Error::TooFewObservations {
                given: g.len(),
                needed: 2,
            });
        }
        if let Some(index) = g.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(g))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl AsRef<[f64]> for ConstraintValues {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntSolution {
    pub weights: Vec<f64>,
    /// Multiplier on the moment condition. `±∞` when infeasible, with the
    /// sign of the direction in which the tilt would have to run.
    pub lambda: f64,
    /// `ln Σ_k e^{−λ g_k}`.
    pub log_partition: f64,
    /// `2n Σ π_j ln(n π_j)`; `f64::INFINITY` when the constraint is unreachable.
    pub statistic: f64,
    pub converged: bool,
    /// Achieved `|Σ π_j g_j|`.
    pub residual: f64,
    pub iterations: usize,
}

impl MaxEntSolution {
    pub fn is_feasible(&self) -> bool {
        self.statistic.is_finite()
    }
}

/// Tilted weights and the first two π-moments of `g` at `lambda`.
struct Tilt {
    log_partition: f64,
    mean: f64,
    variance: f64,
}

fn tilt(g: &[f64], lambda: f64) -> Tilt {
    // Max-shift so the largest exponent is 0.
    let shift = g
        .iter()
        .map(|&v| -lambda * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for &v in g {
        let w = (-lambda * v - shift).exp();
        s0 += w;
        s1 += w * v;
        s2 += w * v * v;
    }
    let mean = s1 / s0;
    Tilt {
        log_partition: shift + s0.ln(),
        mean,
        variance: (s2 / s0 - mean * mean).max(0.0),
    }
}

/// Solves the entropy-maximization problem for `g` to `|Σ π g| ≤ tol · max|g|`.
pub fn solve_maxent(g: &ConstraintValues, tol: f64) -> Result<MaxEntSolution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain {
            what: "maxent tolerance",
            value: tol,
        });
    }
    let g = g.as_slice();
    let n = g.len();
    let uniform = vec![1.0 / n as f64; n];
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(MaxEntSolution {
            weights: uniform,
            lambda: 0.0,
            log_partition: (n as f64).ln(),
            statistic: 0.0,
            converged: true,
            residual: 0.0,
            iterations: 0,
        });
    }
    let (lo, hi) = g
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let margin = FEASIBILITY_MARGIN * scale;
    if lo >= -margin || hi <= margin {
        // Positive g needs λ → +∞ to push mass to the smallest value, and vice versa.
        let direction = if lo >= -margin { 1.0 } else { -1.0 };
        return Ok(MaxEntSolution {
            weights: uniform,
            lambda: direction * f64::INFINITY,
            log_partition: f64::NAN,
            statistic: f64::INFINITY,
            converged: false,
            residual: (g.iter().sum::<f64>() / n as f64).abs(),
            iterations: 0,
        });
    }

    let target = tol * scale;
    let mut iterations = 0;
    let at_zero = tilt(g, 0.0);
    let (mut lambda, mut current) = (0.0, at_zero);

    if current.mean.abs() > target {
        // m(0) > 0 ⇒ root at λ > 0.
        let dir = current.mean.signum();
        let mut a = 0.0;
        let mut b = dir / scale;
        let mut mb = tilt(g, b).mean;
        while mb * dir > 0.0 {
            a = b;
            b *= 2.0;
            mb = tilt(g, b).mean;
            iterations += 1;
            if iterations > MAX_ITERATIONS {
                break;
            }
        }
        // Now m(a)·dir > 0 ≥ m(b)·dir; keep (lo_l, hi_l) ordered.
        let (mut lo_l, mut hi_l) = if a < b { (a, b) } else { (b, a) };
        lambda = 0.5 * (a + b);
        loop {
            current = tilt(g, lambda);
            iterations += 1;
            if current.mean.abs() <= target || iterations >= MAX_ITERATIONS {
                break;
            }
            // m decreasing: m > 0 ⇒ root lies above λ.
            if current.mean > 0.0 {
                lo_l = lambda;
            } else {
                hi_l = lambda;
            }
            let newton = if current.variance > 0.0 {
                lambda + current.mean / current.variance
            } else {
                f64::NAN
            };
            lambda = if newton > lo_l && newton < hi_l {
                newton
            } else {
                0.5 * (lo_l + hi_l)
            };
            if hi_l - lo_l <= f64::EPSILON * lambda.abs().max(f64::MIN_POSITIVE) {
                current = tilt(g, lambda);
                break;
            }
        }
    }

    let weights: Vec<f64> = g
        .iter()
        .map(|&v| (-lambda * v - current.log_partition).exp())
        .collect();
    let residual = current.mean.abs();
    let converged = residual <= target;
    let statistic = if converged {
        et_statistic_from_log_weights(g, lambda, current.log_partition)
    } else {
        f64::INFINITY
    };
    Ok(MaxEntSolution {
        weights,
        lambda,
        log_partition: current.log_partition,
        statistic,
        converged,
        residual,
        iterations,
    })
}

fn et_statistic_from_log_weights(g: &[f64], lambda: f64, log_partition: f64) -> f64 {
    let n = g.len() as f64;
    let ln_n = n.ln();
    let sum: f64 = g
        .iter()
        .map(|&v| {
            let ln_pi = -lambda * v - log_partition;
            ln_pi.exp() * (ln_n + ln_pi)
        })
        .sum();
    (2.0 * n * sum).max(0.0)
}

/// ET statistic `2n Σ π_j ln(n π_j)` of a solution.
///
/// Equals `2n · KL(π ‖ uniform)`. A non-converged solution yields the
/// `+∞` marker.
pub fn et_statistic(solution: &MaxEntSolution, n: usize) -> Result<f64> {
    if n != solution.weights.len() {
        return Err(Error::LengthMismatch {
            left: n,
            right: solution.weights.len(),
        });
    }
    if !solution.converged {
        return Ok(f64::INFINITY);
    }
    Ok(et_statistic_of_weights(&solution.weights))
}

/// `2n Σ π_j ln(n π_j)` evaluated directly on a weight vector.
pub fn et_statistic_of_weights(weights: &[f64]) -> f64 {
    let n = weights.len() as f64;
    let sum: f64 = weights
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * (n * p).ln())
        .sum();
    (2.0 * n * sum).max(0.0)
}

/// Cressie–Read power divergence
/// `I(p, q, γ) = 1/(γ(γ+1)) Σ p_j [(p_j/q_j)^γ − 1]`.
///
/// The removable singularities are filled with their limits:
/// `Σ p ln(p/q)` at γ = 0 and `Σ q ln(q/p)` at γ = −1. Near those points
/// the bracket is evaluated with `expm1` so the formula stays continuous.
pub fn cressie_read(p: &[f64], q: &[f64], gamma: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    check_probabilities(p, "p")?;
    check_probabilities(q, "q")?;
    if !gamma.is_finite() {
        return Err(Error::Domain {
            what: "Cressie-Read gamma",
            value: gamma,
        });
    }
    let log_ratio = |a: f64, b: f64| (a / b).ln();
    if gamma == 0.0 {
        return Ok(p.iter().zip(q).map(|(&a, &b)| a * log_ratio(a, b)).sum());
    }
    if gamma == -1.0 {
        return Ok(p.iter().zip(q).map(|(&a, &b)| b * log_ratio(b, a)).sum());
    }
    let delta = gamma + 1.0;
    let sum: f64 = if delta.abs() < 0.5 {
        // Σ p[(p/q)^γ − 1] = Σ q[(p/q)^{γ+1} − 1] because Σp = Σq.
        p.iter()
            .zip(q)
            .map(|(&a, &b)| b * (delta * log_ratio(a, b)).exp_m1())
            .sum()
    } else {
        p.iter()
            .zip(q)
            .map(|(&a, &b)| a * (gamma * log_ratio(a, b)).exp_m1())
            .sum()
    };
    Ok(sum / (gamma * delta))
}

fn check_probabilities(p: &[f64], name: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidProbabilities(format!("{name} is empty")));
    }
    if let Some(v) = p.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidProbabilities(format!(
            "{name} has non-positive entry {v}"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidProbabilities(format!("{name} sums to {total}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn solve(g: &[f64]) -> MaxEntSolution {
        solve_maxent(&ConstraintValues::new(g.to_vec()).unwrap(), DEFAULT_TOLERANCE).unwrap()
    }

    fn entropy(p: &[f64]) -> f64 {
        -p.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum::<f64>()
    }

    #[test]
    fn symmetric_pair_is_uniform() {
        let s = solve(&[1.0, -1.0]);
        assert!(s.converged);
        assert_eq!(s.lambda, 0.0);
        assert_eq!(s.weights, vec![0.5, 0.5]);
        assert_eq!(s.statistic, 0.0);
    }

    #[test]
    fn two_point_closed_form() {
        let s = solve(&[2.0, -1.0]);
        assert!(s.converged);
        assert!((s.weights[0] - 1.0 / 3.0).abs() < 1e-10);
        assert!((s.weights[1] - 2.0 / 3.0).abs() < 1e-10);
        let closed = 4.0 * ((1.0f64 / 3.0) * (2.0f64 / 3.0).ln() + (2.0f64 / 3.0) * (4.0f64 / 3.0).ln());
        assert!((closed - 0.22653).abs() < 1e-5);
        assert!((s.statistic - closed).abs() < 1e-9);
        // Dense grid over the two-point simplex: only π₀ = 1/3 satisfies the constraint.
        let best = (1..100_000)
            .map(|i| i as f64 / 100_000.0)
            .min_by(|a, b| {
                (2.0 * a - (1.0 - a)).abs().total_cmp(&(2.0 * b - (1.0 - b)).abs())
            })
            .unwrap();
        assert!((best - s.weights[0]).abs() < 1e-4);
    }

    #[test]
    fn infeasible_when_same_sign() {
        let s = solve(&[1.0, 2.0, 3.0]);
        assert!(!s.converged);
        assert_eq!(s.statistic, f64::INFINITY);
        assert_eq!(s.lambda, f64::INFINITY);
        let s = solve(&[-1.0, -2.0]);
        assert_eq!(s.statistic, f64::INFINITY);
        assert_eq!(s.lambda, f64::NEG_INFINITY);
        // Zero on the boundary leaves no interior solution.
        assert_eq!(solve(&[0.0, 1.0]).statistic, f64::INFINITY);
    }

    #[test]
    fn all_zero_constraint_is_trivially_met() {
        let s = solve(&[0.0, 0.0, 0.0]);
        assert!(s.converged);
        assert_eq!(s.statistic, 0.0);
    }

    #[test]
    fn statistic_of_weights_examples() {
        assert_eq!(et_statistic_of_weights(&[0.25; 4]), 0.0);
        assert!((et_statistic_of_weights(&[1.0 / 3.0, 2.0 / 3.0]) - 0.22653).abs() < 1e-5);
        let direct = et_statistic_of_weights(&[0.5, 0.25, 0.25]);
        let mut independent = 0.0;
        for p in [0.5f64, 0.25, 0.25] {
            independent += p * (3.0 * p).ln();
        }
        independent *= 6.0;
        assert!((direct - independent).abs() < 1e-14);
        assert!((direct - 0.353349).abs() < 1e-6);
    }

    #[test]
    fn et_statistic_checks_length_and_convergence() {
        let s = solve(&[2.0, -1.0]);
        assert!(et_statistic(&s, 3).is_err());
        assert!((et_statistic(&s, 2).unwrap() - s.statistic).abs() < 1e-12);
        let bad = solve(&[1.0, 1.0]);
        assert_eq!(et_statistic(&bad, 2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn rejects_bad_constraint_values() {
        assert!(ConstraintValues::new(vec![1.0]).is_err());
        assert!(ConstraintValues::new(vec![1.0, f64::NAN]).is_err());
        let g = ConstraintValues::new(vec![1.0, -1.0]).unwrap();
        assert!(solve_maxent(&g, 0.0).is_err());
    }

    #[test]
    fn extreme_spread_stays_finite() {
        let mut g = vec![-1.0; 999];
        g.push(1e6);
        let s = solve(&g);
        assert!(s.converged);
        assert!(s.weights.iter().all(|w| w.is_finite() && *w > 0.0));
        assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    /// Brute-force maximum entropy: the weights on all but the two extreme-g
    /// points run over a lattice of spacing `step`; those two are solved
    /// exactly from the sum and moment conditions, so every candidate is
    /// exactly feasible.
    fn grid_max_entropy(g: &[f64], step: f64) -> (f64, Vec<f64>) {
        let n = g.len();
        let hi = (0..n).max_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
        let lo = (0..n).min_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
        let free: Vec<usize> = (0..n).filter(|&i| i != hi && i != lo).collect();
        let m = (1.0 / step).round() as usize;
        let mut best = (f64::NEG_INFINITY, vec![]);
        let mut idx = vec![1usize; free.len()];
        loop {
            let used: usize = idx.iter().sum();
            if used < m {
                let mut p = vec![0.0; n];
                let mut rest = 1.0;
                let mut moment = 0.0;
                for (k, &i) in free.iter().enumerate() {
                    p[i] = idx[k] as f64 * step;
                    rest -= p[i];
                    moment -= g[i] * p[i];
                }
                p[hi] = (moment - g[lo] * rest) / (g[hi] - g[lo]);
                p[lo] = rest - p[hi];
                if p[hi] > 0.0 && p[lo] > 0.0 {
                    let h = entropy(&p);
                    if h > best.0 {
                        best = (h, p);
                    }
                }
            }
            // Odometer over the free coordinates.
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return best;
                }
                idx[k] += 1;
                if idx[..].iter().sum::<usize>() < m {
                    break;
                }
                idx[k] = 1;
                k += 1;
            }
        }
    }

    #[test]
    fn matches_grid_oracle_small_n() {
        let cases: [&[f64]; 5] = [
            &[0.7, -1.3],
            &[2.0, -0.5, 0.1],
            &[-1.0, 0.3, 0.9],
            &[1.2, -0.4, -0.9, 0.2],
            &[0.5, 0.5, -2.0, 1.0],
        ];
        for g in cases {
            let s = solve(g);
            let (oracle, weights) = grid_max_entropy(g, 1e-3);
            let h = entropy(&s.weights);
            assert!(h >= oracle - 1e-12, "{g:?}: solver {h} below grid {oracle}");
            assert!(h - oracle < 1e-4, "{g:?}: solver {h} vs grid {oracle}");
            for (a, b) in s.weights.iter().zip(&weights) {
                assert!((a - b).abs() < 1e-2, "{g:?}");
            }
        }
    }

    #[test]
    fn cressie_read_examples() {
        let p = [0.5, 0.5];
        let q = [0.25, 0.75];
        for gamma in [-2.0, -1.0, -0.5, 0.0, 1.0, 3.0] {
            assert_eq!(cressie_read(&p, &p, gamma).unwrap(), 0.0);
        }
        let g1 = cressie_read(&p, &q, 1.0).unwrap();
        let mut loop_sum = 0.0;
        for j in 0..2 {
            loop_sum += p[j] * (p[j] / q[j] - 1.0);
        }
        assert!((g1 - loop_sum / 2.0).abs() < 1e-15);
        assert!((g1 - 1.0 / 6.0).abs() < 1e-12);
        let kl = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
        assert!((kl - 0.14384).abs() < 1e-5);
        assert!((cressie_read(&p, &q, 0.0).unwrap() - kl).abs() < 1e-15);
        let rev = 0.25 * 0.5f64.ln() + 0.75 * 1.5f64.ln();
        assert!((cressie_read(&p, &q, -1.0).unwrap() - rev).abs() < 1e-15);
    }

    #[test]
    fn cressie_read_continuous_at_limits() {
        let p = [0.2, 0.3, 0.5];
        let q = [0.4, 0.4, 0.2];
        for base in [0.0, -1.0] {
            let at = cressie_read(&p, &q, base).unwrap();
            for d in [1e-4, -1e-4] {
                let near = cressie_read(&p, &q, base + d).unwrap();
                assert!((near - at).abs() < 1e-6 * 10.0_f64.max(at.abs()), "γ={}", base + d);
            }
        }
    }

    #[test]
    fn cressie_read_rejects_bad_input() {
        assert!(cressie_read(&[0.5, 0.5], &[1.0], 1.0).is_err());
        assert!(cressie_read(&[1.0, 0.0], &[0.5, 0.5], 1.0).is_err());
        assert!(cressie_read(&[0.6, 0.6], &[0.5, 0.5], 1.0).is_err());
    }

    fn feasible_g() -> impl Strategy<Value = Vec<f64>> {
        (prop::collection::vec(-5.0..5.0f64, 1..40), 0.01..5.0f64, -5.0..-0.01f64).prop_map(
            |(mut v, pos, neg)| {
                v.push(pos);
                v.push(neg);
                v
            },
        )
    }

    proptest! {
        #[test]
        fn solution_invariants(g in feasible_g()) {
            let s = solve(&g);
            prop_assert!(s.converged);
            let total: f64 = s.weights.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!(s.weights.iter().all(|&w| w > 0.0 && w < 1.0));
            let moment: f64 = s.weights.iter().zip(&g).map(|(p, v)| p * v).sum();
            let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            prop_assert!(moment.abs() <= 1e-9 * scale);
            prop_assert!(s.statistic >= 0.0);
            let direct = et_statistic_of_weights(&s.weights);
            prop_assert!((direct - s.statistic).abs() <= 1e-7 * (1.0 + direct));
        }

        #[test]
        fn dual_derivative_decreasing(g in feasible_g(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let ml = tilt(&g, lo).mean;
            let mh = tilt(&g, hi).mean;
            prop_assert!(mh <= ml + 1e-12);
        }

        #[test]
        fn scale_and_sign_covariance(g in feasible_g(), c in 0.1..10.0f64) {
            let s = solve(&g);
            let scaled: Vec<f64> = g.iter().map(|v| c * v).collect();
            let sc = solve(&scaled);
            for (a, b) in s.weights.iter().zip(&sc.weights) {
                prop_assert!((a - b).abs() < 1e-8);
            }
            prop_assert!((sc.lambda - s.lambda / c).abs() < 1e-6 * (1.0 + s.lambda.abs() / c));
            let neg: Vec<f64> = g.iter().map(|v| -v).collect();
            let sn = solve(&neg);
            prop_assert!((sn.lambda + s.lambda).abs() < 1e-6 * (1.0 + s.lambda.abs()));
            prop_assert!((sn.statistic - s.statistic).abs() < 1e-7 * (1.0 + s.statistic));
        }

        #[test]
        fn zero_iff_uniform(g in feasible_g()) {
            let s = solve(&g);
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if mean.abs() <= 1e-10 * scale {
                prop_assert!(s.statistic < 1e-12);
            } else {
                prop_assert!(s.statistic > 0.0);
            }
        }
    }
}
