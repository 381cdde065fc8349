//! Criteria of a two-dimensional variable with independent marginals,
//! `p_ij = p1_i * p2_j`, against the uniform joint `1 / (N K)`.

use crate::criteria::{d_sq, entropy, EntropyScale};
use crate::DiscreteDistribution;

/// Marginal entropies below this are treated as zero by [`complexity_2d`].
pub const ENTROPY_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductDistribution2D {
    pub p1: DiscreteDistribution,
    pub p2: DiscreteDistribution,
}

impl ProductDistribution2D {
    pub fn new(p1: DiscreteDistribution, p2: DiscreteDistribution) -> Self {
        Self { p1, p2 }
    }

    /// `(N, K)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.p1.size(), self.p2.size())
    }

    /// Row-major `N x K` joint probabilities.
    pub fn joint(&self) -> Vec<f64> {
        self.p1
            .probs()
            .iter()
            .flat_map(|&a| self.p2.probs().iter().map(move |&b| a * b))
            .collect()
    }
}

/// `H(p1) + H(p2)`, the entropy of the product joint.
pub fn entropy_2d(pd: &ProductDistribution2D) -> f64 {
    entropy(&pd.p1) + entropy(&pd.p2)
}

/// Disequilibrium of the explicit joint against the uniform joint,
/// `(1/NK) sum (p_ij - q_ij)^2 / q_ij`.
pub fn disequilibrium_2d_direct(pd: &ProductDistribution2D) -> f64 {
    let (n, k) = pd.shape();
    let cells = (n * k) as f64;
    let q = 1.0 / cells;
    pd.joint()
        .iter()
        .map(|&p| (p - q) * (p - q) / q)
        .sum::<f64>()
        / cells
}

/// The same disequilibrium from the one-dimensional ones:
/// `D1 / K + D2 / N + D1 D2`.
pub fn disequilibrium_2d_factored(pd: &ProductDistribution2D) -> f64 {
    let (n, k) = pd.shape();
    let d1 = d_sq(&pd.p1);
    let d2 = d_sq(&pd.p2);
    d1 / k as f64 + d2 / n as f64 + d1 * d2
}

/// Two-dimensional complexity `H_2d * D_2d` (entropy in bits).
///
/// Evaluated through the marginal complexities `C_i = H(p_i) D(p_i)`:
/// `(C1/K)(1 + H2/H1) + (C2/N)(1 + H1/H2) + C1 C2 (1/H1 + 1/H2)`.
/// That form divides by the marginal entropies; when either is below
/// [`ENTROPY_FLOOR`] the plain product is returned instead.
pub fn complexity_2d(pd: &ProductDistribution2D) -> f64 {
    let (h1, h2) = (entropy(&pd.p1), entropy(&pd.p2));
    if h1 < ENTROPY_FLOOR || h2 < ENTROPY_FLOOR {
        return complexity_2d_direct(pd);
    }
    let (n, k) = pd.shape();
    let c1 = crate::criteria::c_sq(&pd.p1, EntropyScale::Bits);
    let c2 = crate::criteria::c_sq(&pd.p2, EntropyScale::Bits);
    c1 / k as f64 * (1.0 + h2 / h1)
        + c2 / n as f64 * (1.0 + h1 / h2)
        + c1 * c2 * (1.0 / h1 + 1.0 / h2)
}

/// `H_2d * D_2d` straight from the joint.
pub fn complexity_2d_direct(pd: &ProductDistribution2D) -> f64 {
    entropy_2d(pd) * disequilibrium_2d_direct(pd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pair(p1: DiscreteDistribution, p2: DiscreteDistribution) -> ProductDistribution2D {
        ProductDistribution2D::new(p1, p2)
    }

    fn brute_entropy(pd: &ProductDistribution2D) -> f64 {
        let mut h = 0.0;
        for &a in pd.p1.probs() {
            for &b in pd.p2.probs() {
                let p = a * b;
                if p > 0.0 {
                    h -= p * p.log2();
                }
            }
        }
        h
    }

    #[test]
    fn entropy_examples() {
        let pd = pair(
            DiscreteDistribution::uniform(4),
            DiscreteDistribution::uniform(8),
        );
        assert_abs_diff_eq!(entropy_2d(&pd), 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(brute_entropy(&pd), 5.0, epsilon = 1e-12);
        let p2 = DiscreteDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let pd = pair(DiscreteDistribution::delta(3, 1), p2.clone());
        assert_abs_diff_eq!(entropy_2d(&pd), entropy(&p2), epsilon = 1e-15);
    }

    #[test]
    fn disequilibrium_examples() {
        let pd = pair(
            DiscreteDistribution::uniform(4),
            DiscreteDistribution::uniform(8),
        );
        assert_abs_diff_eq!(disequilibrium_2d_direct(&pd), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(disequilibrium_2d_factored(&pd), 0.0, epsilon = 1e-15);

        let pd = pair(
            DiscreteDistribution::delta(3, 0),
            DiscreteDistribution::delta(5, 4),
        );
        assert_abs_diff_eq!(
            disequilibrium_2d_direct(&pd),
            1.0 - 1.0 / 15.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            disequilibrium_2d_factored(&pd),
            1.0 - 1.0 / 15.0,
            epsilon = 1e-12
        );

        let pd = pair(
            DiscreteDistribution::delta(2, 0),
            DiscreteDistribution::uniform(4),
        );
        assert_abs_diff_eq!(disequilibrium_2d_factored(&pd), 0.125, epsilon = 1e-15);
        assert_abs_diff_eq!(disequilibrium_2d_direct(&pd), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn complexity_examples() {
        let pd = pair(
            DiscreteDistribution::uniform(4),
            DiscreteDistribution::uniform(8),
        );
        assert_abs_diff_eq!(complexity_2d(&pd), 0.0, epsilon = 1e-14);
        let pd = pair(
            DiscreteDistribution::delta(4, 0),
            DiscreteDistribution::delta(8, 0),
        );
        assert_eq!(complexity_2d(&pd), 0.0);
    }

    #[test]
    fn reduces_to_one_dimension_when_k_is_one() {
        let p1 = DiscreteDistribution::new(vec![0.1, 0.6, 0.3]).unwrap();
        let pd = pair(p1.clone(), DiscreteDistribution::uniform(1));
        assert_abs_diff_eq!(disequilibrium_2d_direct(&pd), d_sq(&p1), epsilon = 1e-15);
        assert_abs_diff_eq!(
            complexity_2d(&pd),
            entropy(&p1) * d_sq(&p1),
            epsilon = 1e-15
        );
    }

    fn simplex(n: std::ops::Range<usize>) -> impl Strategy<Value = DiscreteDistribution> {
        prop::collection::vec(0.0f64..1.0, n)
            .prop_filter("needs mass", |w| w.iter().sum::<f64>() > 1e-6)
            .prop_map(|w| DiscreteDistribution::from_weights(w).unwrap())
    }

    proptest! {
        #[test]
        fn entropy_additive(p1 in simplex(1..20), p2 in simplex(1..20)) {
            let pd = pair(p1, p2);
            prop_assert!((entropy_2d(&pd) - brute_entropy(&pd)).abs() < 1e-12);
        }

        #[test]
        fn factored_matches_direct(p1 in simplex(1..30), p2 in simplex(1..30)) {
            let pd = pair(p1, p2);
            prop_assert!((disequilibrium_2d_factored(&pd) - disequilibrium_2d_direct(&pd)).abs() < 1e-12);
            prop_assert!((complexity_2d(&pd) - complexity_2d_direct(&pd)).abs() < 1e-10);
        }
    }
}
