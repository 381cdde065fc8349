//! Self-check of the analytical identities the library relies on.
//!
//! Every check receives its kernels through [`Kernels`], so a harness can
//! substitute a faulty implementation and confirm the check notices.

use entrosig_core::criteria::{self, GaussianParams};
use entrosig_core::multidim::{self, ProductDistribution2D};
use entrosig_core::variation::{self, ConnectionReport, OrderFit, DEFAULT_SCALES};
use entrosig_core::{distributions::dist_time_grouped, DiscreteDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::output::{json_number, SCHEMA_VERSION};

pub const IDENTITY_TOL: f64 = 1e-12;
pub const COMPLEXITY_2D_TOL: f64 = 1e-10;
pub const CONNECTION_TOL: f64 = 1e-9;
/// The equal-occupancy case is an exact identity; only rounding remains.
pub const UNIFORM_CASE_TOL: f64 = 1e-12;
/// Below this `|cubic| / (|quartic| eps_max)` the quartic term still bends
/// the log-log fit at the largest scale.
pub const PRE_ASYMPTOTIC_DOMINANCE: f64 = 2.0;
pub const ORDER_SLOPE_RANGE: (f64, f64) = (2.7, 3.3);
pub const GAUSSIAN_ENTROPY_UNIT: f64 = 2.047096;
pub const GAUSSIAN_ENTROPY_TOL: f64 = 1e-5;
pub const GAUSSIAN_QUADRATURE_RTOL: f64 = 1e-6;

type Dist = DiscreteDistribution;
type Fallible<T> = entrosig_core::Result<T>;

/// The functions under test.
#[derive(Clone, Copy)]
pub struct Kernels {
    pub d_sq: fn(&Dist) -> f64,
    pub disequilibrium: fn(&Dist, &Dist) -> Fallible<f64>,
    pub jsd: fn(&Dist, &Dist) -> Fallible<f64>,
    pub jsd_entropy_form: fn(&Dist, &Dist) -> Fallible<f64>,
    pub entropy: fn(&Dist) -> f64,
    pub residual_order_check: fn(&Dist, &[f64], &[f64]) -> Fallible<OrderFit>,
    pub connection_check: fn(&Dist, usize) -> Fallible<ConnectionReport>,
    pub gaussian_entropy: fn(&GaussianParams) -> f64,
    pub gaussian_disequilibrium: fn(&GaussianParams, &GaussianParams) -> Fallible<f64>,
    pub disequilibrium_2d_factored: fn(&ProductDistribution2D) -> f64,
    pub disequilibrium_2d_direct: fn(&ProductDistribution2D) -> f64,
    pub complexity_2d: fn(&ProductDistribution2D) -> f64,
}

impl Default for Kernels {
    fn default() -> Self {
        Self {
            d_sq: criteria::d_sq,
            disequilibrium: criteria::disequilibrium,
            jsd: criteria::jsd,
            jsd_entropy_form: criteria::jsd_entropy_form,
            entropy: criteria::entropy,
            residual_order_check: variation::residual_order_check,
            connection_check: variation::connection_check,
            gaussian_entropy: criteria::gaussian_entropy,
            gaussian_disequilibrium: criteria::gaussian_disequilibrium,
            disequilibrium_2d_factored: multidim::disequilibrium_2d_factored,
            disequilibrium_2d_direct: multidim::disequilibrium_2d_direct,
            complexity_2d: multidim::complexity_2d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Named numbers worth reporting (worst errors, fitted slopes, ...).
    pub metrics: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
            for (k, v) in &c.metrics {
                out.push_str(&format!("    {k} = {v:.6}\n"));
            }
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} checks, {failed} failed\n", self.checks.len()));
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "passed": c.passed,
                "detail": c.detail,
                "metrics": c.metrics.iter().map(|(k, v)| json!({"name": k, "value": json_number(*v)})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Runs every check with inputs drawn from `seed`.
pub fn run_suite(k: &Kernels, seed: u64) -> VerifyReport {
    VerifyReport {
        checks: vec![
            check_d_sq_identity(k, seed, 10_000),
            check_jsd_forms(k, seed.wrapping_add(1), 10_000),
            check_residual_order(k, seed.wrapping_add(2), 8),
            check_gaussian_entropy(k),
            check_gaussian_disequilibrium(k),
            check_2d_equivalence(k, seed.wrapping_add(3), 1_000),
            check_connection(k, seed.wrapping_add(4), 100),
            check_connection_uniform_case(k, seed.wrapping_add(5), 100),
        ],
    }
}

/// A point drawn uniformly from the probability simplex with `n` states.
pub fn random_simplex(rng: &mut impl Rng, n: usize) -> Dist {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    Dist::from_weights(w).expect("exponential weights have positive mass")
}

fn outcome(name: &'static str, worst: f64, tol: f64, what: &str, count: usize) -> CheckResult {
    let passed = worst <= tol;
    CheckResult {
        name,
        passed,
        detail: format!("{what} over {count} inputs, worst {worst:.3e} (tolerance {tol:e})"),
        metrics: vec![("worst_error".into(), worst)],
    }
}

fn value_or_nan(r: Fallible<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

fn worse(acc: f64, e: f64) -> f64 {
    if e.is_nan() || acc.is_nan() {
        f64::INFINITY
    } else {
        acc.max(e)
    }
}

/// `D_SQ(p) = disequilibrium(p, uniform)` on random simplex points, `N` in 2..=64.
pub fn check_d_sq_identity(k: &Kernels, seed: u64, count: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let n = rng.random_range(2..=64);
        let p = random_simplex(&mut rng, n);
        let d = value_or_nan((k.disequilibrium)(&p, &Dist::uniform(n)));
        worst = worse(worst, ((k.d_sq)(&p) - d).abs());
    }
    outcome(
        "d_sq_identity",
        worst,
        IDENTITY_TOL,
        "D_SQ(p) vs D(p, uniform)",
        count,
    )
}

/// JSD as KL to the midpoint vs the entropy form.
pub fn check_jsd_forms(k: &Kernels, seed: u64, count: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let n = rng.random_range(2..=64);
        let (p, q) = (random_simplex(&mut rng, n), random_simplex(&mut rng, n));
        let a = value_or_nan((k.jsd)(&p, &q));
        let b = value_or_nan((k.jsd_entropy_form)(&p, &q));
        worst = worse(worst, (a - b).abs());
    }
    outcome(
        "jsd_dual_forms",
        worst,
        IDENTITY_TOL,
        "KL-to-midpoint vs H(m) - (H(p)+H(q))/2",
        count,
    )
}

/// Fitted order of the second-order expansion residual for random
/// `(q, direction)` pairs, `per_size` pairs for each `N` in {4, 16, 64}.
pub fn check_residual_order(k: &Kernels, seed: u64, per_size: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = ORDER_SLOPE_RANGE;
    let eps_max = DEFAULT_SCALES.iter().copied().fold(0.0, f64::max);
    let mut metrics = Vec::new();
    let mut slopes = Vec::new();
    let mut outside = Vec::new();
    for n in [4usize, 16, 64] {
        for i in 0..per_size {
            let q = Dist::from_weights((0..n).map(|_| rng.random_range(0.2..1.0)).collect())
                .expect("positive");
            let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dir = variation::zero_sum_direction(&q, &raw);
            let slope = dir
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|d| (k.residual_order_check)(&q, d, &DEFAULT_SCALES))
                .map_or(f64::NAN, |fit| fit.slope);
            let dominance = dir
                .and_then(|d| variation::expansion_coefficients(&q, &d))
                .map_or(f64::NAN, |(c3, c4)| c3.abs() / (c4.abs() * eps_max));
            if !(lo..=hi).contains(&slope) {
                outside.push(format!(
                    "n{n}_{i} (slope {slope:.3}, cubic dominance {dominance:.3})"
                ));
            }
            slopes.push(slope);
            metrics.push((format!("slope_n{n}_{i}"), slope));
            metrics.push((format!("cubic_dominance_n{n}_{i}"), dominance));
        }
    }
    let (min, max) = slopes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| {
            (a.min(s), b.max(s))
        });
    let mut detail = format!(
        "{} pairs, slopes in [{min:.3}, {max:.3}], {} outside [{lo}, {hi}]",
        slopes.len(),
        outside.len()
    );
    if !outside.is_empty() {
        detail.push_str(&format!(": {}", outside.join(", ")));
    }
    CheckResult {
        name: "residual_order",
        passed: outside.is_empty(),
        detail,
        metrics,
    }
}

/// Pairs outside the slope range whose cubic term is not small, i.e. whose
/// miss cannot be put down to the quartic term at `eps = 1e-2`.
pub fn unexplained_order_misses(result: &CheckResult) -> Vec<String> {
    let (lo, hi) = ORDER_SLOPE_RANGE;
    let lookup = |name: &str| {
        result
            .metrics
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    };
    result
        .metrics
        .iter()
        .filter_map(|(name, slope)| {
            let pair = name.strip_prefix("slope_")?;
            if (lo..=hi).contains(slope) {
                return None;
            }
            let dominance = lookup(&format!("cubic_dominance_{pair}")).unwrap_or(f64::NAN);
            let excused = dominance < PRE_ASYMPTOTIC_DOMINANCE;
            (!excused).then(|| pair.to_string())
        })
        .collect()
}

pub fn check_gaussian_entropy(k: &Kernels) -> CheckResult {
    let h = (k.gaussian_entropy)(&GaussianParams::new(0.0, 1.0).expect("valid"));
    let err = (h - GAUSSIAN_ENTROPY_UNIT).abs();
    CheckResult {
        name: "gaussian_entropy",
        passed: err <= GAUSSIAN_ENTROPY_TOL,
        detail: format!("H(N(0,1)) = {h:.7} bits, expected {GAUSSIAN_ENTROPY_UNIT}"),
        metrics: vec![("entropy_bits".into(), h)],
    }
}

/// Composite Simpson rule with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

fn ln_normal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    -0.5 * ((x - mu) / sigma).powi(2) - (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln()
}

/// `integral p^2 / q - 1` by quadrature, for comparison with the closed form.
pub fn gaussian_disequilibrium_quadrature(p: &GaussianParams, q: &GaussianParams) -> f64 {
    let (sp, sq) = (p.sigma(), q.sigma());
    let a = 2.0 * sq * sq - sp * sp;
    let width = sp * sq / a.sqrt();
    let centre = (2.0 * sq * sq * p.mu() - sp * sp * q.mu()) / a;
    let integral = simpson(
        |x| (2.0 * ln_normal_pdf(x, p.mu(), sp) - ln_normal_pdf(x, q.mu(), sq)).exp(),
        centre - 40.0 * width,
        centre + 40.0 * width,
        200_000,
    );
    integral - 1.0
}

/// Closed-form Gaussian disequilibrium vs quadrature on a 5 x 5 grid of
/// mean offsets and spread ratios inside the convergent region.
pub fn check_gaussian_disequilibrium(k: &Kernels) -> CheckResult {
    let q = GaussianParams::new(0.0, 1.0).expect("valid");
    let mut worst = 0.0f64;
    let mut count = 0;
    for dmu in [-1.5, -0.5, 0.0, 0.8, 2.0] {
        for ratio in [0.25, 0.5, 1.0, 1.2, 1.38] {
            let p = GaussianParams::new(dmu, ratio).expect("valid");
            let closed = value_or_nan((k.gaussian_disequilibrium)(&p, &q));
            let numeric = gaussian_disequilibrium_quadrature(&p, &q);
            worst = worse(worst, (closed - numeric).abs() / numeric.abs().max(1.0));
            count += 1;
        }
    }
    outcome(
        "gaussian_disequilibrium",
        worst,
        GAUSSIAN_QUADRATURE_RTOL,
        "closed form vs quadrature (relative)",
        count,
    )
}

/// Factored and direct 2-D disequilibrium and complexity on random marginals.
pub fn check_2d_equivalence(k: &Kernels, seed: u64, count: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_d, mut worst_c) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let (n, m) = (rng.random_range(1..=40), rng.random_range(1..=40));
        let pd =
            ProductDistribution2D::new(random_simplex(&mut rng, n), random_simplex(&mut rng, m));
        let direct = (k.disequilibrium_2d_direct)(&pd);
        worst_d = worse(
            worst_d,
            ((k.disequilibrium_2d_factored)(&pd) - direct).abs(),
        );
        let h = (k.entropy)(&pd.p1) + (k.entropy)(&pd.p2);
        worst_c = worse(worst_c, ((k.complexity_2d)(&pd) - h * direct).abs());
    }
    CheckResult {
        name: "two_dimensional_factorization",
        passed: worst_d <= IDENTITY_TOL && worst_c <= COMPLEXITY_2D_TOL,
        detail: format!(
            "{count} marginal pairs, disequilibrium worst {worst_d:.3e} (tolerance {IDENTITY_TOL:e}), \
             complexity worst {worst_c:.3e} (tolerance {COMPLEXITY_2D_TOL:e})"
        ),
        metrics: vec![("worst_disequilibrium".into(), worst_d), ("worst_complexity".into(), worst_c)],
    }
}

/// `p^0` constant inside each of `n_levels` levels of `[0, max]`: mid-level
/// values, top level always present at the maximum, `reps(j)` copies of each.
pub fn level_constant_p0(n_levels: usize, mut reps: impl FnMut(usize) -> usize) -> Dist {
    let mut w = Vec::new();
    for j in 0..n_levels {
        let v = if j + 1 == n_levels {
            1.0
        } else {
            (j as f64 + 0.5) / n_levels as f64
        };
        w.extend(std::iter::repeat_n(v, reps(j)));
    }
    Dist::from_weights(w).expect("top level is always present")
}

/// `H(p^0) = log2 N - D_KL(p^1 || p^t)` on level-constant inputs.
pub fn check_connection(k: &Kernels, seed: u64, count: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let n_levels = rng.random_range(2..=32);
        let p0 = level_constant_p0(n_levels, |j| {
            if j + 1 < n_levels && rng.random_bool(0.3) {
                0
            } else {
                rng.random_range(1..=6)
            }
        });
        worst = worse(
            worst,
            (k.connection_check)(&p0, n_levels).map_or(f64::NAN, |r| r.gap.abs()),
        );
    }
    outcome(
        "connection_identity",
        worst,
        CONNECTION_TOL,
        "H(p0) vs log2 N - KL(p1 || pt)",
        count,
    )
}

/// Equal occupancy (`p^t` uniform): `H(p^0) = log2 N - log2 n + H(p^1)`.
pub fn check_connection_uniform_case(k: &Kernels, seed: u64, count: usize) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let n_levels = rng.random_range(2..=32);
        let per_level = rng.random_range(1..=8);
        let p0 = level_constant_p0(n_levels, |_| per_level);
        let err = match dist_time_grouped(&p0, n_levels) {
            Ok((p1, _)) => {
                let n = p0.size() as f64;
                let closed = n.log2() - (n_levels as f64).log2() + (k.entropy)(&p1);
                ((k.entropy)(&p0) - closed).abs()
            }
            Err(_) => f64::NAN,
        };
        worst = worse(worst, err);
    }
    outcome(
        "connection_uniform_case",
        worst,
        UNIFORM_CASE_TOL,
        "H(p0) vs log2 N - log2 n + H(p1)",
        count,
    )
}

/// The suite as the `verify` subcommand prints it.
pub fn render(report: &VerifyReport, json: bool) -> Vec<u8> {
    if json {
        crate::output::to_json_bytes(&report.to_json())
    } else {
        report.to_text().into_bytes()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_suite_passes() {
        let report = run_suite(&Kernels::default(), 0);
        assert!(report.passed(), "{}", report.to_text());
        assert_eq!(report.checks.len(), 8);
    }

    #[test]
    fn report_lists_slopes() {
        let report = run_suite(&Kernels::default(), 3);
        let c = report
            .checks
            .iter()
            .find(|c| c.name == "residual_order")
            .unwrap();
        assert_eq!(c.metrics.len(), 48);
        assert!(report.to_text().contains("slope_n64_7"));
    }

    #[test]
    fn near_cancelling_cubic_is_the_only_tolerated_miss() {
        let order = check_residual_order(&Kernels::default(), 3, 8);
        assert!(!order.passed);
        assert!(order.detail.contains("n4_6"));
        assert!(unexplained_order_misses(&order).is_empty());
    }

    fn second_order_residual(q: &Dist, d: &[f64], scales: &[f64]) -> Fallible<OrderFit> {
        // Drops the D term, leaving a quadratic remainder.
        let points: Vec<(f64, f64)> = scales
            .iter()
            .map(|&e| {
                let p = variation::perturb(q, d, e).unwrap();
                (
                    e,
                    (criteria::entropy(&p) - criteria::entropy(q) - criteria::lh(&p, q).unwrap())
                        .abs(),
                )
            })
            .collect();
        let xs: Vec<f64> = points.iter().map(|(e, _)| e.ln()).collect();
        let ys: Vec<f64> = points.iter().map(|(_, r)| r.ln()).collect();
        let (slope, intercept) = variation::linear_fit(&xs, &ys);
        Ok(OrderFit {
            slope,
            intercept,
            points,
        })
    }

    #[test]
    fn wrong_expansion_is_not_excused() {
        let k = Kernels {
            residual_order_check: second_order_residual,
            ..Kernels::default()
        };
        let order = check_residual_order(&k, 3, 8);
        assert_eq!(unexplained_order_misses(&order).len(), 23);
    }

    fn bad_d_sq(p: &Dist) -> f64 {
        // Forgets the 1/N offset on the last state.
        let n = p.size() as f64;
        let k = p.size() - 1;
        p.probs()
            .iter()
            .enumerate()
            .map(|(i, x)| if i == k { x * x } else { (x - 1.0 / n).powi(2) })
            .sum()
    }

    fn bad_entropy(p: &Dist) -> f64 {
        criteria::entropy(p) * 1.000001
    }

    #[test]
    fn injected_d_sq_bug_is_caught() {
        let k = Kernels {
            d_sq: bad_d_sq,
            ..Kernels::default()
        };
        let report = run_suite(&k, 0);
        assert!(!report.passed());
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        assert_eq!(failed, vec!["d_sq_identity"]);
    }

    #[test]
    fn injected_entropy_bug_is_caught() {
        let k = Kernels {
            entropy: bad_entropy,
            ..Kernels::default()
        };
        let report = run_suite(&k, 0);
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "connection_uniform_case" && !c.passed));
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "two_dimensional_factorization" && !c.passed));
    }
}
