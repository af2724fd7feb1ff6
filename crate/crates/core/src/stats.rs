//! Descriptive primitives shared by the diagnostics.

use crate::scalar::{mean, Real};

/// Sample variance with the `n - 1` denominator (two-pass).
pub fn sample_variance<T: Real>(xs: &[T]) -> T {
    let m = mean(xs);
    let ss = xs.iter().fold(T::zero(), |acc, &x| acc + (x - m) * (x - m));
    ss / T::from_count(xs.len() - 1)
}

pub fn sorted<T: Real>(xs: &[T]) -> Vec<T> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite responses"));
    v
}

/// Quantile of already-sorted data by linear interpolation between order
/// statistics (`h = (n - 1) p`, Hyndman–Fan type 7).
pub fn quantile_sorted<T: Real>(sorted: &[T], p: T) -> T {
    let h = T::from_count(sorted.len() - 1) * p;
    let lo = h.floor();
    let i = lo.to_usize().expect("index");
    if i + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    let frac = h - lo;
    if frac == T::zero() {
        return sorted[i];
    }
    sorted[i] + frac * (sorted[i + 1] - sorted[i])
}

/// Ranks starting at 1; tied values share the average of their positions.
pub fn average_ranks<T: Real>(xs: &[T]) -> Vec<T> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite responses"));
    let mut ranks = vec![T::zero(); xs.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && xs[idx[end]] == xs[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let avg = T::from_count(start + 1 + end) * T::half();
        for &k in &idx[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation; `None` when either column is constant.
pub fn pearson<T: Real>(x: &[T], y: &[T]) -> Option<T> {
    let mx = mean(x);
    let my = mean(y);
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy = sxy + da * db;
        sxx = sxx + da * da;
        syy = syy + db * db;
    }
    if sxx == T::zero() || syy == T::zero() {
        return None;
    }
    // sqrt of a square is exact, so r(x, ±x) is exactly ±1
    let r = sxy / (sxx * syy).sqrt();
    Some(r.max(-T::one()).min(T::one()))
}

#[cfg(test)]
fn spearman<T: Real>(x: &[T], y: &[T]) -> Option<T> {
    pearson(&average_ranks(x), &average_ranks(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_quartiles() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile_sorted(&s, 0.25), 2.0);
        assert_eq!(quantile_sorted(&s, 0.75), 4.0);
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.25), 1.75);
        assert_eq!(quantile_sorted(&s, 0.5), 2.5);
        assert_eq!(quantile_sorted(&[7.0f32], 0.9), 7.0);
    }

    #[test]
    fn ties_share_average_rank() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn variance_of_one_to_five() {
        assert_eq!(sample_variance(&[1.0, 2.0, 3.0, 4.0, 5.0]), 2.5);
    }

    #[test]
    fn pearson_edge_cases() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(pearson(&x, &x), Some(1.0));
        assert_eq!(pearson(&x, &neg), Some(-1.0));
        assert_eq!(pearson(&x, &[2.0; 4]), None);
        assert_eq!(spearman(&x, &[1.0, 4.0, 9.0, 100.0]), Some(1.0));
    }
}
