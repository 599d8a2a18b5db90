//! Boolean threshold model for two-channel polarization correlations.
//!
//! Each photon pair carries one shared hidden polarization angle `lambda`,
//! uniform on `[0, pi)`. An analyzer at `alpha` answers deterministically:
//! `+1` when the hidden axis lies within `pi/4` of the analyzer axis
//! (boundary included on both ends), else `-1`. The coincidence probability
//! is then a sawtooth in the analyzer separation, and the model saturates
//! the classical bound `|S| = 2` at the standard test angles.

use serde::{Deserialize, Serialize};

use crate::rng::CounterRng;
use crate::scalar::{axis_distance, cast, fold_angle, Real};

/// Hidden polarization angle carried by a pair, in `[0, pi)`.
pub type LambdaHV<T> = T;

/// The four analyzer settings of a two-station correlation test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellAngles<T> {
    pub a: T,
    pub a_prime: T,
    pub b: T,
    pub b_prime: T,
}

impl<T: Real> BellAngles<T> {
    /// The standard settings `a = 0`, `a' = pi/4`, `b = pi/8`, `b' = 3pi/8`
    /// that maximize `|S|` for the cosine-squared law.
    pub fn standard() -> Self {
        Self {
            a: T::zero(),
            a_prime: T::FRAC_PI_4(),
            b: T::PI() / cast(8.0),
            b_prime: T::PI() * cast(3.0) / cast(8.0),
        }
    }
}

/// Deterministic analyzer answer for hidden angle `lambda` at setting
/// `alpha`: `+1` iff the axes are within `pi/4` (inclusive).
pub fn boolean_outcome<T: Real>(lambda: LambdaHV<T>, alpha: T) -> i8 {
    if axis_distance(lambda, alpha) <= T::FRAC_PI_4() {
        1
    } else {
        -1
    }
}

/// Exact double-plus coincidence probability of the Boolean model as a
/// function of analyzer separation: a sawtooth with period `pi`, reflected
/// about `pi/2`, running linearly from `1/2` at zero separation to `0` at
/// `pi/2`.
pub fn sawtooth_prob<T: Real>(delta: T) -> T {
    let mut d = fold_angle(delta);
    if d > T::FRAC_PI_2() {
        d = T::PI() - d;
    }
    cast::<T>(0.5) - d / T::PI()
}

/// Double-plus coincidence probability of the cosine-squared law for an
/// anticorrelated source: `cos^2(alpha - beta) / 2`.
pub fn qm_pp<T: Real>(alpha: T, beta: T) -> T {
    let c = (alpha - beta).cos();
    cast::<T>(0.5) * c * c
}

/// Monte Carlo tallies from sampled hidden angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceEstimate<T> {
    /// Fraction of pairs with `+1` at both stations.
    pub p_pp: T,
    /// Fraction with `+1` at the first station, regardless of the second.
    pub p_plus_a: T,
    /// Fraction with `+1` at the second station.
    pub p_plus_b: T,
    pub n: u64,
}

/// Samples `n` hidden angles and tallies coincidence and single rates for
/// analyzers at `alpha` and `beta`.
pub fn mc_coincidence<T: Real>(alpha: T, beta: T, n: u64, rng: &CounterRng) -> CoincidenceEstimate<T> {
    let mut n_pp = 0u64;
    let mut n_a = 0u64;
    let mut n_b = 0u64;
    for i in 0..n {
        let lambda: T = rng.angle(i, 0);
        let oa = boolean_outcome(lambda, alpha);
        let ob = boolean_outcome(lambda, beta);
        if oa == 1 {
            n_a += 1;
        }
        if ob == 1 {
            n_b += 1;
        }
        if oa == 1 && ob == 1 {
            n_pp += 1;
        }
    }
    let den = cast::<T>(n as f64);
    CoincidenceEstimate {
        p_pp: cast::<T>(n_pp as f64) / den,
        p_plus_a: cast::<T>(n_a as f64) / den,
        p_plus_b: cast::<T>(n_b as f64) / den,
        n,
    }
}

/// Two-channel correlator from a double-plus probability, assuming the
/// symmetric-source relation `E = 4 P(+,+) - 1`.
pub fn correlator_from_pp<T: Real>(p_pp: T) -> T {
    cast::<T>(4.0) * p_pp - T::one()
}

/// CHSH combination from a double-plus probability law.
///
/// The minus sign sits on the `(a, b')` term, the placement that maximizes
/// `|S|` at [`BellAngles::standard`]:
/// `S = E(a,b) - E(a,b') + E(a',b) + E(a',b')`.
pub fn chsh_value<T: Real>(p_pp: impl Fn(T, T) -> T, angles: &BellAngles<T>) -> T {
    let e = |alpha, beta| correlator_from_pp(p_pp(alpha, beta));
    e(angles.a, angles.b) - e(angles.a, angles.b_prime)
        + e(angles.a_prime, angles.b)
        + e(angles.a_prime, angles.b_prime)
}

/// Clauser-Horne combination from probability laws, with the same sign
/// placement as [`chsh_value`]:
/// `J = P(a,b) - P(a,b') + P(a',b) + P(a',b') - P_A(a') - P_B(b)`.
///
/// Local models obey `J <= 0`; the cosine-squared law reaches
/// `(sqrt(2) - 1) / 2` at the standard angles.
pub fn ch_value<T: Real>(
    p_pp: impl Fn(T, T) -> T,
    p_single_a: impl Fn(T) -> T,
    p_single_b: impl Fn(T) -> T,
    angles: &BellAngles<T>,
) -> T {
    p_pp(angles.a, angles.b) - p_pp(angles.a, angles.b_prime)
        + p_pp(angles.a_prime, angles.b)
        + p_pp(angles.a_prime, angles.b_prime)
        - p_single_a(angles.a_prime)
        - p_single_b(angles.b)
}
