use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cvr::cvr_value;
use crate::scalar::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalSource {
    Binomial,
    Override,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValue<T> {
    pub n_raters: usize,
    pub alpha: f64,
    /// Smallest essential count that beats chance; `None` when no count can.
    pub min_essential: Option<usize>,
    pub value: T,
    pub source: CriticalSource,
}

impl<T: Value> CriticalValue<T> {
    /// Even a unanimous panel cannot reach significance.
    pub fn panel_too_small(&self) -> bool {
        self.min_essential.is_none()
    }

    pub fn passes(&self, n_essential: usize) -> bool {
        self.min_essential.is_some_and(|k| n_essential >= k)
    }
}

/// Minimum CVR under a one-sided exact binomial test with p = 1/2.
///
/// Finds the smallest `k` with `P(X >= k) <= alpha` for `X ~ Binomial(N, 1/2)`
/// and returns `(k - N/2) / (N/2)`. The tail comparison is done in exact
/// integer/rational arithmetic, so the result is exact for any panel size.
/// When no `k <= N` qualifies the value is 1 and `min_essential` is `None`.
pub fn cvr_critical_value<T: Value>(n_raters: usize, alpha: f64) -> CriticalValue<T> {
    assert!(n_raters >= 2, "critical values need at least 2 raters");
    assert!(alpha > 0.0 && alpha < 0.5, "alpha must lie in (0, 0.5)");

    let alpha_exact = BigRational::from_float(alpha).expect("finite alpha");
    let total = BigUint::one() << n_raters;
    // alpha * 2^N as an exact rational bound on the upper-tail count
    let bound = alpha_exact * BigRational::from_integer(BigInt::from(total));

    let coeffs = binomial_row(n_raters);
    let mut tail = BigUint::zero();
    let mut min_essential = None;
    for k in (0..=n_raters).rev() {
        tail += &coeffs[k];
        if BigRational::from_integer(BigInt::from(tail.clone())) <= bound {
            min_essential = Some(k);
        } else {
            break;
        }
    }

    CriticalValue {
        n_raters,
        alpha,
        min_essential,
        value: min_essential.map_or_else(T::one, |k| cvr_value(k, n_raters)),
        source: CriticalSource::Binomial,
    }
}

/// Critical value supplied by the user for this panel size.
pub(crate) fn override_critical<T: Value>(n_raters: usize, alpha: f64, value: f64) -> CriticalValue<T> {
    let value_t = T::from_f64_lossy(value);
    let min_essential = (0..=n_raters).find(|&k| cvr_value::<T>(k, n_raters) >= value_t);
    CriticalValue { n_raters, alpha, min_essential, value: value_t, source: CriticalSource::Override }
}

fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 1..=n {
        c = c * BigUint::from(n + 1 - k) / BigUint::from(k);
        row.push(c.clone());
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn panel_of_five() {
        let cv = cvr_critical_value::<f64>(5, 0.05);
        assert_eq!(cv.min_essential, Some(5));
        assert_eq!(cv.value, 1.0);
        assert!(cv.passes(5) && !cv.passes(4));
    }

    #[test]
    fn panel_of_eight() {
        let cv = cvr_critical_value::<Ratio<i64>>(8, 0.05);
        assert_eq!(cv.min_essential, Some(7));
        assert_eq!(cv.value, Ratio::new(3, 4));
    }

    #[test]
    fn panel_of_two_cannot_reach_significance() {
        let cv = cvr_critical_value::<f64>(2, 0.05);
        assert!(cv.panel_too_small());
        assert_eq!(cv.value, 1.0);
        assert!(!cv.passes(2));
    }

    #[test]
    fn binomial_row_matches_pascal() {
        let row = binomial_row(6);
        let want = [1u32, 6, 15, 20, 15, 6, 1];
        assert!(row.iter().zip(want).all(|(a, b)| *a == BigUint::from(b)));
    }

    #[test]
    fn larger_alpha_never_raises_the_bar() {
        for n in 2..=40 {
            let strict = cvr_critical_value::<f64>(n, 0.01);
            let loose = cvr_critical_value::<f64>(n, 0.10);
            assert!(loose.value <= strict.value, "N={n}");
        }
    }

    #[test]
    fn override_finds_smallest_passing_count() {
        let cv = override_critical::<f64>(10, 0.05, 0.62);
        // CVR for 8 of 10 is 0.6, 9 of 10 is 0.8
        assert_eq!(cv.min_essential, Some(9));
        assert_eq!(cv.source, CriticalSource::Override);
    }
}
