//! Entropy variation and the identities tying the time distributions together.
//!
//! For a small zero-sum change `dq = p - q` the exact entropy difference
//! splits as
//!
//! ```text
//! H(p) - H(q) = LH(p || q) - N D(p, q) / (2 ln 2) + residual
//! ```
//!
//! where the residual is cubic in `dq`. [`residual_order_check`] confirms the
//! order numerically by fitting `log |residual|` against `log eps`.
//!
//! The grouped time distributions satisfy
//! `H(p^0) ~ log2 N - D_KL(p^1 || p^t)`, exact when `p^0` is constant inside
//! each grouping level; [`connection_check`] reports the gap.

use std::f64::consts::LN_2;

use statrs::function::erf::erfc;

use crate::criteria::{disequilibrium, entropy, kl_divergence, lh};
use crate::distributions::dist_time_grouped;
use crate::{DiscreteDistribution, Error, Result};

/// Perturbation scales used for the residual-order fit.
pub const DEFAULT_SCALES: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];

/// Exact `H(p) - H(q)`.
pub fn entropy_variation(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    if p.size() != q.size() {
        return Err(Error::SizeMismatch {
            left: p.size(),
            right: q.size(),
        });
    }
    Ok(entropy(p) - entropy(q))
}

/// Terms of the second-order entropy-variation expansion, all in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerms {
    pub lh_term: f64,
    pub d_term: f64,
    pub residual: f64,
}

impl ExpansionTerms {
    /// `lh_term - d_term`, the second-order approximation of `H(p) - H(q)`.
    pub fn approximation(&self) -> f64 {
        self.lh_term - self.d_term
    }
}

/// Splits `H(p) - H(q)` into `LH(p || q)`, `N D(p, q) / (2 ln 2)` and the
/// remainder. `q` must be strictly positive.
pub fn expansion_decomposition(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
) -> Result<ExpansionTerms> {
    let variation = entropy_variation(p, q)?;
    let lh_term = lh(p, q)?;
    let d_term = disequilibrium(p, q)? * q.size() as f64 / (2.0 * LN_2);
    Ok(ExpansionTerms {
        lh_term,
        d_term,
        residual: variation - (lh_term - d_term),
    })
}

/// Projects `raw` onto the zero-sum hyperplane and scales it so that
/// `max |d_i / q_i| = 1`; `q + eps d` then stays inside the simplex for
/// every `eps < 1`.
pub fn zero_sum_direction(q: &DiscreteDistribution, raw: &[f64]) -> Result<Vec<f64>> {
    if raw.len() != q.size() {
        return Err(Error::SizeMismatch {
            left: raw.len(),
            right: q.size(),
        });
    }
    if q.probs().iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidParameter(
            "q must be strictly positive".into(),
        ));
    }
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let centered: Vec<f64> = raw.iter().map(|r| r - mean).collect();
    let worst = centered
        .iter()
        .zip(q.probs())
        .map(|(d, qi)| (d / qi).abs())
        .fold(0.0, f64::max);
    if worst == 0.0 {
        return Err(Error::InvalidParameter(
            "direction is zero after centering".into(),
        ));
    }
    Ok(centered.into_iter().map(|d| d / worst).collect())
}

/// `q + eps * direction` as a distribution.
pub fn perturb(
    q: &DiscreteDistribution,
    direction: &[f64],
    eps: f64,
) -> Result<DiscreteDistribution> {
    if direction.len() != q.size() {
        return Err(Error::SizeMismatch {
            left: direction.len(),
            right: q.size(),
        });
    }
    let probs: Vec<f64> = q
        .probs()
        .iter()
        .zip(direction)
        .map(|(qi, di)| qi + eps * di)
        .collect();
    if probs.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::LeavesSimplex(eps));
    }
    DiscreteDistribution::new(probs).map_err(|_| Error::LeavesSimplex(eps))
}

/// Leading coefficients of the residual along `q + eps d`, in bits:
/// `(sum d^3 / q^2 / 6, -sum d^4 / q^3 / 12) / ln 2`, so that
/// `residual ~ cubic eps^3 + quartic eps^4`.
///
/// When `|cubic|` is small next to `|quartic| eps` the fitted slope over
/// `eps` is not yet 3.
pub fn expansion_coefficients(q: &DiscreteDistribution, direction: &[f64]) -> Result<(f64, f64)> {
    if direction.len() != q.size() {
        return Err(Error::SizeMismatch {
            left: direction.len(),
            right: q.size(),
        });
    }
    let (mut c3, mut c4) = (0.0, 0.0);
    for (d, &qi) in direction.iter().zip(q.probs()) {
        if qi <= 0.0 {
            return Err(Error::InvalidParameter(
                "q must be strictly positive".into(),
            ));
        }
        c3 += d.powi(3) / (qi * qi);
        c4 += d.powi(4) / (qi * qi * qi);
    }
    Ok((c3 / (6.0 * LN_2), -c4 / (12.0 * LN_2)))
}

/// Residual of the expansion at each scale, with the fitted log-log slope.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(eps, |residual|)` per scale.
    pub points: Vec<(f64, f64)>,
}

impl OrderFit {
    /// `|r(eps_k)| / |r(eps_{k+1})|` for consecutive scales.
    pub fn successive_ratios(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[0].1 / w[1].1).collect()
    }
}

/// Least-squares slope and intercept of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits the order of the expansion residual along `q + eps * direction`.
///
/// `direction` must sum to zero. A slope near 3 confirms the remainder is
/// `o(eps^2)`; directions whose cubic moment `sum d^3 / q^2` vanishes show
/// the quartic slope 4 instead.
pub fn residual_order_check(
    q: &DiscreteDistribution,
    direction: &[f64],
    scales: &[f64],
) -> Result<OrderFit> {
    if scales.len() < 2 {
        return Err(Error::InvalidParameter("need at least two scales".into()));
    }
    if let Some(&bad) = scales.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidParameter(format!(
            "scale {bad} is not positive"
        )));
    }
    let total: f64 = direction.iter().sum();
    let magnitude: f64 = direction.iter().map(|d| d.abs()).sum();
    if total.abs() > 1e-12 * magnitude.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "direction sums to {total}, not zero"
        )));
    }
    let mut points = Vec::with_capacity(scales.len());
    for &eps in scales {
        let p = perturb(q, direction, eps)?;
        let r = expansion_decomposition(&p, q)?.residual.abs();
        if r == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "residual vanished at eps = {eps}"
            )));
        }
        points.push((eps, r));
    }
    let xs: Vec<f64> = points.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, r)| r.ln()).collect();
    let (slope, intercept) = linear_fit(&xs, &ys);
    Ok(OrderFit {
        slope,
        intercept,
        points,
    })
}

/// Both sides of `H(p^0) ~ log2 N - D_KL(p^1 || p^t)`, in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

pub fn connection_check(p0: &DiscreteDistribution, n_levels: usize) -> Result<ConnectionReport> {
    let (p1, pt) = dist_time_grouped(p0, n_levels)?;
    let lhs = entropy(p0);
    // pt_j = 0 forces p1_j = 0, so the strict KL is always defined here.
    let rhs = (p0.size() as f64).log2() - kl_divergence(&p1, &pt)?;
    Ok(ConnectionReport {
        lhs,
        rhs,
        gap: lhs - rhs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupingStability {
    /// `(n_levels, D_KL(p^1 || p^t))` per alphabet size.
    pub rows: Vec<(usize, f64)>,
    /// `max - min` of the divergences.
    pub spread: f64,
}

/// `D_KL(p^1 || p^t)` for each alphabet size in `n_values`.
pub fn grouping_stability(
    p0: &DiscreteDistribution,
    n_values: &[usize],
) -> Result<GroupingStability> {
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let (p1, pt) = dist_time_grouped(p0, n)?;
        rows.push((n, kl_divergence(&p1, &pt)?));
    }
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| {
            (lo.min(v), hi.max(v))
        });
    let spread = if rows.is_empty() { 0.0 } else { hi - lo };
    Ok(GroupingStability { rows, spread })
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Kolmogorov-Smirnov distance between `p^1` (mass over level indices) and
/// the normal law with the same mean and variance.
///
/// Both one-sided limits of each jump of the level CDF are compared. A
/// distribution with zero variance cannot be moment-matched and scores 1.
pub fn gaussianity_check(p1: &DiscreteDistribution) -> f64 {
    let probs = p1.probs();
    let mean: f64 = probs.iter().enumerate().map(|(j, p)| j as f64 * p).sum();
    let var: f64 = probs
        .iter()
        .enumerate()
        .map(|(j, p)| (j as f64 - mean).powi(2) * p)
        .sum();
    if var <= 1e-15 {
        return 1.0;
    }
    let sd = var.sqrt();
    let mut below = 0.0;
    let mut worst: f64 = 0.0;
    for (j, &p) in probs.iter().enumerate() {
        let g = normal_cdf((j as f64 - mean) / sd);
        let above = below + p;
        worst = worst.max((g - below).abs()).max((g - above).abs());
        below = above;
    }
    worst
}
