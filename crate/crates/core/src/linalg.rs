//! Least squares with intercept via column-pivoted Householder QR.

use crate::scalar::{mean, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeastSquaresFit<T> {
    /// Residual sum of squares.
    pub sse: T,
    /// Total sum of squares of the centered target.
    pub sst: T,
    /// Numerical rank of the centered predictor block.
    pub rank: usize,
}

impl<T: Real> LeastSquaresFit<T> {
    /// `1 - SSE/SST`; `None` for a constant target.
    pub fn r_squared(&self) -> Option<T> {
        if self.sst == T::zero() {
            return None;
        }
        Some((T::one() - self.sse / self.sst).max(T::zero()).min(T::one()))
    }
}

/// Regresses `target` on `predictors` (column-major) with an intercept.
///
/// The intercept is absorbed by centering every column. Predictor columns
/// that are numerically in the span of those already factored (including
/// constant columns) are skipped, so rank-deficient predictor blocks still
/// yield the correct projection residual.
pub fn least_squares<T: Real>(target: &[T], predictors: &[Vec<T>]) -> LeastSquaresFit<T> {
    let n = target.len();
    let center = |col: &[T]| {
        let m = mean(col);
        col.iter().map(|&x| x - m).collect::<Vec<T>>()
    };
    let mut b = center(target);
    let sst = dot(&b, &b);
    let mut cols: Vec<Vec<T>> = predictors.iter().map(|c| center(c)).collect();
    let orig: Vec<T> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut active: Vec<usize> = (0..cols.len()).filter(|&j| orig[j] > T::zero()).collect();

    let tol = T::rank_tol();
    let mut rank = 0;
    while rank < n && !active.is_empty() {
        // pivot: largest remaining norm relative to the column's original norm
        let mut best: Option<(usize, T)> = None;
        active.retain(|&j| {
            let rem = dot(&cols[j][rank..], &cols[j][rank..]).sqrt();
            let rel = rem / orig[j];
            if rel <= tol {
                return false;
            }
            if best.is_none_or(|(_, r)| rel > r) {
                best = Some((j, rel));
            }
            true
        });
        let Some((p, _)) = best else { break };
        active.retain(|&j| j != p);

        let x = &cols[p][rank..];
        let norm = dot(x, x).sqrt();
        let alpha = if x[0] > T::zero() { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] = v[0] - alpha;
        let vv = dot(&v, &v);
        if vv > T::zero() {
            let reflect = |y: &mut [T]| {
                let s = (dot(&v, y) + dot(&v, y)) / vv;
                for (yi, &vi) in y.iter_mut().zip(&v) {
                    *yi = *yi - s * vi;
                }
            };
            for &j in &active {
                reflect(&mut cols[j][rank..]);
            }
            reflect(&mut b[rank..]);
        }
        rank += 1;
    }

    let sse = dot(&b[rank..], &b[rank..]);
    LeastSquaresFit { sse, sst, rank }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_fit_has_zero_residual() {
        let x1 = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let x2 = vec![2.0, 1.0, 4.0, 3.0, 5.0];
        let y: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| 3.0 * a - 2.0 * b + 7.0).collect();
        let fit = least_squares(&y, &[x1, x2]);
        assert_eq!(fit.rank, 2);
        assert!(fit.sse / fit.sst < 1e-20);
    }

    #[test]
    fn duplicate_predictors_do_not_inflate_rank() {
        let x1 = vec![1.0, 3.0, 2.0, 5.0, 4.0, 6.0];
        let dup = x1.iter().map(|v| 2.0 * v + 1.0).collect();
        let y = vec![2.0_f64, 1.0, 2.0, 3.0, 5.0, 4.0];
        let single = least_squares(&y, std::slice::from_ref(&x1));
        let both = least_squares(&y, &[x1, dup, vec![3.0; 6]]);
        assert_eq!(both.rank, 1);
        assert!((single.sse - both.sse).abs() < 1e-12);
    }

    #[test]
    fn simple_regression_matches_closed_form() {
        let x = [1.0_f64, 2.0, 3.0, 4.0, 6.0];
        let y = [2.0, 2.5, 3.0, 5.0, 5.5];
        let fit = least_squares(&y, &[x.to_vec()]);
        let r = crate::stats::pearson(&x, &y).unwrap();
        assert!((fit.r_squared().unwrap() - r * r).abs() < 1e-14);
    }

    #[test]
    fn constant_target_has_no_r_squared() {
        let fit = least_squares(&[2.0f32; 4], &[vec![1.0, 2.0, 3.0, 5.0]]);
        assert_eq!(fit.r_squared(), None);
    }
}
