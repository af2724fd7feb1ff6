//! Scalar abstractions.
//!
//! Counting formulas, weights and composites only need field arithmetic and
//! an ordering, so they are written against [`Value`] and also work with an
//! exact rational type. Anything that takes square roots or solves least
//! squares requires [`Real`], implemented for `f32` and `f64`.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like scalar with a total-enough ordering for sorting responses.
pub trait Value: Num + Copy + PartialOrd + FromPrimitive + Debug + Send + Sync + 'static {
    /// Lossless-where-possible conversion from a parsed response.
    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::zero)
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar type")
    }

    fn half() -> Self {
        Self::one() / (Self::one() + Self::one())
    }
}

impl<T> Value for T where T: Num + Copy + PartialOrd + FromPrimitive + Debug + Send + Sync + 'static {}

/// Floating-point scalar used by the diagnostic statistics.
pub trait Real: Value + Float + ToPrimitive {
    /// Relative SSE/SST threshold under which a regression is treated as an
    /// exact linear dependence.
    fn dependence_tol() -> Self;

    /// Relative column-norm threshold used for rank decisions in the QR solver.
    fn rank_tol() -> Self;

    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("literal representable")
    }
}

macro_rules! impl_real {
    ($($t:ty => $dep:expr, $rank:expr);* $(;)?) => {
        $(
            impl Real for $t {
                fn dependence_tol() -> $t {
                    $dep
                }
                fn rank_tol() -> $t {
                    $rank
                }
            }
        )*
    };
}

impl_real! {
    f64 => 1e-10, 1e-12;
    f32 => 1e-5, 1e-6;
}

/// Arithmetic mean of a non-empty slice.
pub(crate) fn mean<T: Value>(xs: &[T]) -> T {
    let sum = xs.iter().fold(T::zero(), |acc, &x| acc + x);
    sum / T::from_count(xs.len())
}

pub(crate) fn min_max<T: Value>(xs: &[T]) -> (T, T) {
    let mut lo = xs[0];
    let mut hi = xs[0];
    for &x in &xs[1..] {
        if x < lo {
            lo = x;
        }
        if x > hi {
            hi = x;
        }
    }
    (lo, hi)
}
