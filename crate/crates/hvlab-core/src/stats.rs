//! Small statistics helpers shared by the experiments and the test suite.

use crate::scalar::{cast, Real};

/// Least-squares fit of `y = amplitude * sin^2(delta)` through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sin2Fit<T> {
    pub amplitude: T,
    /// Coefficient of determination about the sample mean.
    pub r_squared: T,
}

/// Fits the one-parameter law `y = A sin^2(delta)` and reports how much of
/// the variance about the mean it explains.
pub fn fit_sin2<T: Real>(deltas: &[T], ys: &[T]) -> Sin2Fit<T> {
    assert_eq!(deltas.len(), ys.len(), "x and y lengths differ");
    assert!(deltas.len() >= 2, "need at least two points");
    let mut num = T::zero();
    let mut den = T::zero();
    for (&d, &y) in deltas.iter().zip(ys) {
        let s = d.sin() * d.sin();
        num += s * y;
        den += s * s;
    }
    assert!(den > T::zero(), "all basis values vanish on this grid");
    let amplitude = num / den;

    let n = cast::<T>(ys.len() as f64);
    let mean = ys.iter().fold(T::zero(), |acc, &y| acc + y) / n;
    let mut ss_res = T::zero();
    let mut ss_tot = T::zero();
    for (&d, &y) in deltas.iter().zip(ys) {
        let fitted = amplitude * d.sin() * d.sin();
        ss_res += (y - fitted) * (y - fitted);
        ss_tot += (y - mean) * (y - mean);
    }
    let r_squared = if ss_tot > T::zero() {
        T::one() - ss_res / ss_tot
    } else {
        T::zero()
    };
    Sin2Fit {
        amplitude,
        r_squared,
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_se<T: Real>(xs: &[T]) -> (T, T) {
    assert!(xs.len() >= 2, "need at least two samples");
    let n = cast::<T>(xs.len() as f64);
    let mean = xs.iter().fold(T::zero(), |acc, &x| acc + x) / n;
    let var = xs
        .iter()
        .fold(T::zero(), |acc, &x| acc + (x - mean) * (x - mean))
        / n;
    (mean, (var / n).sqrt())
}

/// Pearson chi-square statistic of observed counts against a uniform
/// expectation.
pub fn chi_square_uniform<T: Real>(counts: &[u64]) -> T {
    assert!(!counts.is_empty());
    let total: u64 = counts.iter().sum();
    let expected = cast::<T>(total as f64) / cast::<T>(counts.len() as f64);
    counts.iter().fold(T::zero(), |acc, &c| {
        let d = cast::<T>(c as f64) - expected;
        acc + d * d / expected
    })
}
