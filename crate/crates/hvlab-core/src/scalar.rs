//! Scalar abstraction used throughout the numeric core.
//!
//! Everything downstream is generic over a floating-point scalar so the same
//! code runs in `f32` and `f64`. The crate root exports `f64` aliases for the
//! common types; `f64` is what the test suite and the CLI use.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar for the laboratory.
///
/// A trait alias: anything that is an IEEE float with the usual constants and
/// conversions qualifies. Implemented for `f32` and `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into the working scalar.
///
/// Panics only if the target type cannot represent any `f64` at all, which
/// never happens for the supported scalars.
#[inline]
pub fn cast<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("scalar conversion from f64")
}

/// Folds an angle into the canonical polarization range `[0, pi)`.
///
/// Polarization axes are lines, not rays: an axis at `theta` and one at
/// `theta + pi` are the same physical axis.
#[inline]
pub fn fold_angle<T: Real>(theta: T) -> T {
    let pi = T::PI();
    let mut t = theta % pi;
    if t < T::zero() {
        t = t + pi;
    }
    // `theta % pi` can round to exactly `pi` for inputs just below a multiple.
    if t >= pi {
        t = t - pi;
    }
    t
}

/// Angular distance between two axes, the shorter way around, in `[0, pi/2]`.
#[inline]
pub fn axis_distance<T: Real>(a: T, b: T) -> T {
    let d = fold_angle(a - b);
    if d > T::FRAC_PI_2() {
        T::PI() - d
    } else {
        d
    }
}
