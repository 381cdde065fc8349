//! Scalar information criteria over one or two discrete distributions.
//!
//! All logarithms are base 2, so entropic values are in bits. Terms with
//! `p_i = 0` contribute nothing (`0 log 0 = 0`).

use std::f64::consts::{E, LN_2, PI};

use crate::{DiscreteDistribution, Error, Result};

/// Floor applied to zero probabilities under [`SupportPolicy::EpsilonFloor`].
pub const EPSILON_FLOOR: f64 = 1e-12;

/// How divergences treat `q_i = 0` against `p_i > 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SupportPolicy {
    /// Report [`Error::SupportViolation`].
    #[default]
    Strict,
    /// Raise every entry to at least [`EPSILON_FLOOR`] and renormalize.
    EpsilonFloor,
}

/// Entropy factor used inside complexities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EntropyScale {
    /// `H / log2 N`, in `[0, 1]`.
    #[default]
    Normalized,
    Bits,
}

fn same_size(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.size() != q.size() {
        return Err(Error::SizeMismatch {
            left: p.size(),
            right: q.size(),
        });
    }
    Ok(())
}

fn floored(p: &DiscreteDistribution) -> DiscreteDistribution {
    let weights = p.probs().iter().map(|&v| v.max(EPSILON_FLOOR)).collect();
    DiscreteDistribution::from_weights(weights).expect("floored weights are positive")
}

fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Shannon entropy `-sum p log2 p`.
pub fn entropy(p: &DiscreteDistribution) -> f64 {
    -p.probs().iter().map(|&x| xlog2x(x)).sum::<f64>()
}

/// `H(p) / log2 N`.
pub fn normalized_entropy(p: &DiscreteDistribution) -> Result<f64> {
    if p.size() < 2 {
        return Err(Error::InvalidParameter(
            "normalized entropy needs at least 2 states".into(),
        ));
    }
    Ok(entropy(p) / (p.size() as f64).log2())
}

/// `log2 N`, the entropy of the uniform distribution over `N` states.
pub fn max_entropy(n: usize) -> f64 {
    (n as f64).log2()
}

pub fn cross_entropy(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    cross_entropy_with(p, q, SupportPolicy::Strict)
}

/// Cross-entropy `H(p, q) = -sum p log2 q`.
pub fn cross_entropy_with(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    policy: SupportPolicy,
) -> Result<f64> {
    same_size(p, q)?;
    let q = match policy {
        SupportPolicy::Strict => std::borrow::Cow::Borrowed(q),
        SupportPolicy::EpsilonFloor => std::borrow::Cow::Owned(floored(q)),
    };
    let mut acc = 0.0;
    for (index, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::SupportViolation { index, p: pi });
        }
        acc -= pi * qi.log2();
    }
    Ok(acc)
}

pub fn kl_divergence(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    kl_divergence_with(p, q, SupportPolicy::Strict)
}

/// `D_KL(p || q) = sum p log2(p / q)`, never negative.
pub fn kl_divergence_with(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    policy: SupportPolicy,
) -> Result<f64> {
    same_size(p, q)?;
    let (p, q) = match policy {
        SupportPolicy::Strict => (std::borrow::Cow::Borrowed(p), std::borrow::Cow::Borrowed(q)),
        SupportPolicy::EpsilonFloor => (
            std::borrow::Cow::Owned(floored(p)),
            std::borrow::Cow::Owned(floored(q)),
        ),
    };
    let mut acc = 0.0;
    for (index, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::SupportViolation { index, p: pi });
        }
        acc += pi * (pi / qi).log2();
    }
    // Summation order can leave a tiny negative value when p ~ q.
    Ok(acc.max(0.0))
}

pub fn symmetrized_kl(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    symmetrized_kl_with(p, q, SupportPolicy::Strict)
}

/// `rho(p || q) = D_KL(p || q) + D_KL(q || p)`.
pub fn symmetrized_kl_with(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    policy: SupportPolicy,
) -> Result<f64> {
    Ok(kl_divergence_with(p, q, policy)? + kl_divergence_with(q, p, policy)?)
}

fn midpoint(p: &DiscreteDistribution, q: &DiscreteDistribution) -> DiscreteDistribution {
    let m = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    DiscreteDistribution::from_weights(m).expect("midpoint of two distributions has unit mass")
}

/// Jensen-Shannon divergence through the midpoint mixture `m = (p + q) / 2`:
/// `(D_KL(p || m) + D_KL(q || m)) / 2`. Bounded by 1 bit.
pub fn jsd(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_size(p, q)?;
    let m = midpoint(p, q);
    // m_i > 0 wherever p_i or q_i is, so the strict form cannot fail.
    Ok(0.5 * (kl_divergence(p, &m)? + kl_divergence(q, &m)?))
}

/// Jensen-Shannon divergence as `H(m) - (H(p) + H(q)) / 2`.
pub fn jsd_entropy_form(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_size(p, q)?;
    let m = midpoint(p, q);
    Ok(entropy(&m) - 0.5 * (entropy(p) + entropy(q)))
}

pub fn sid(reference: &DiscreteDistribution, test: &DiscreteDistribution) -> Result<f64> {
    sid_with(reference, test, SupportPolicy::Strict)
}

/// Spectral information divergence: the symmetrized KL distance between two
/// spectral distributions.
pub fn sid_with(
    reference: &DiscreteDistribution,
    test: &DiscreteDistribution,
    policy: SupportPolicy,
) -> Result<f64> {
    symmetrized_kl_with(reference, test, policy)
}

/// `LH(p || q) = H(p, q) - H(q)`, the first-order term of the entropy
/// variation from `q` to `p`. Zero whenever `q` is uniform.
pub fn lh(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    Ok(cross_entropy(p, q)? - entropy(q))
}

/// `D(p, q) = (1/N) sum (p_i - q_i)^2 / q_i`. Requires `q_i > 0` everywhere.
pub fn disequilibrium(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    same_size(p, q)?;
    let mut acc = 0.0;
    for (index, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if qi <= 0.0 {
            return Err(Error::SupportViolation { index, p: pi });
        }
        let d = pi - qi;
        acc += d * d / qi;
    }
    Ok(acc / p.size() as f64)
}

/// Disequilibrium against the uniform distribution, `sum (p_i - 1/N)^2`.
pub fn d_sq(p: &DiscreteDistribution) -> f64 {
    let u = 1.0 / p.size() as f64;
    p.probs().iter().map(|&x| (x - u) * (x - u)).sum()
}

fn scaled_entropy(p: &DiscreteDistribution, scale: EntropyScale) -> f64 {
    match scale {
        EntropyScale::Bits => entropy(p),
        EntropyScale::Normalized if p.size() < 2 => 0.0,
        EntropyScale::Normalized => entropy(p) / max_entropy(p.size()),
    }
}

/// Statistical complexity `C_SQ = H(p) * D_SQ(p)`.
pub fn c_sq(p: &DiscreteDistribution, scale: EntropyScale) -> f64 {
    scaled_entropy(p, scale) * d_sq(p)
}

/// `JSD(p || u)` against the uniform distribution of the same size.
pub fn d_jsd(p: &DiscreteDistribution) -> f64 {
    jsd(p, &DiscreteDistribution::uniform(p.size())).expect("sizes match by construction")
}

/// Statistical complexity `C_JSD = H(p) * JSD(p || u)`.
pub fn c_jsd(p: &DiscreteDistribution, scale: EntropyScale) -> f64 {
    scaled_entropy(p, scale) * d_jsd(p)
}

/// `H (H_max - H)` in bits squared.
pub fn c_general(p: &DiscreteDistribution) -> f64 {
    let h = entropy(p);
    h * (max_entropy(p.size()) - h)
}

/// Mean and standard deviation of a normal density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    mu: f64,
    sigma: f64,
}

impl GaussianParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gaussian needs finite mu and sigma > 0, got ({mu}, {sigma})"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * self.sigma)
    }
}

/// Differential entropy of a normal density in bits, `log2(sqrt(2 pi e) sigma)`.
pub fn gaussian_entropy(g: &GaussianParams) -> f64 {
    ((2.0 * PI * E).sqrt() * g.sigma).log2()
}

/// Closed-form `integral rho_p^2 / rho_q dx - 1` for two normal densities.
///
/// The integral diverges unless `2 sigma_q^2 > sigma_p^2`.
pub fn gaussian_disequilibrium(p: &GaussianParams, q: &GaussianParams) -> Result<f64> {
    let (sp2, sq2) = (p.sigma * p.sigma, q.sigma * q.sigma);
    let denom = 2.0 * sq2 - sp2;
    if denom <= 0.0 {
        return Err(Error::Singular(denom));
    }
    let dmu = p.mu - q.mu;
    Ok(sq2 / (p.sigma * denom.sqrt()) * (dmu * dmu / denom).exp() - 1.0)
}

/// `H(p, q) - H(q)` for two normal densities.
///
/// Returned in natural-log units as the closed form is printed; multiply by
/// `1 / ln 2` for bits. Only the ratio to a calibration spread matters for
/// detection, so no conversion is applied.
pub fn gaussian_lh(p: &GaussianParams, q: &GaussianParams) -> f64 {
    let dmu = p.mu - q.mu;
    let sq2 = q.sigma * q.sigma;
    dmu * dmu / (2.0 * sq2) + 0.5 * (p.sigma * p.sigma / sq2 - 1.0)
}

/// Converts nats to bits.
pub fn nats_to_bits(x: f64) -> f64 {
    x / LN_2
}
