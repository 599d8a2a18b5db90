//! Small dense linear algebra for polarization vectors, tensor-product
//! states, and exact matrix squares.
//!
//! Three layers:
//! * [`Vec2C`]: a two-component complex vector, the transverse field of one
//!   beam. Real polarization vectors are the special case with zero
//!   imaginary parts.
//! * [`TensorState`]: an amplitude vector over `k` two-component slots
//!   (length `2^k`), with slot 1 stored most significant. Supports tensor
//!   products, conjugate-linear inner products and partial projections that
//!   remove one slot.
//! * [`Mat`]: a square matrix generic over any [`num_traits::Num`] scalar,
//!   so the no-go bookkeeping can run over exact integers and Gaussian
//!   integers instead of floats.

use num_complex::Complex;
use num_traits::Num;
use thiserror::Error;

use crate::scalar::Real;

/// Complex number over the working scalar.
pub type C<T> = Complex<T>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: left has {left} slots, right has {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("slot {slot} out of range for a {slots}-slot state")]
    SlotOutOfRange { slot: usize, slots: usize },
}

// ---------------------------------------------------------------------------
// Two-component complex vectors
// ---------------------------------------------------------------------------

/// Transverse field vector `x * e_x + y * e_y` with complex components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2C<T: Real> {
    pub x: C<T>,
    pub y: C<T>,
}

impl<T: Real> Vec2C<T> {
    pub fn new(x: C<T>, y: C<T>) -> Self {
        Self { x, y }
    }

    /// Real vector from Cartesian components.
    pub fn from_real(x: T, y: T) -> Self {
        Self {
            x: C::new(x, T::zero()),
            y: C::new(y, T::zero()),
        }
    }

    /// Unit linear-polarization vector at angle `theta` from `e_x`.
    pub fn from_angle(theta: T) -> Self {
        Self::from_real(theta.cos(), theta.sin())
    }

    pub fn zero() -> Self {
        Self::from_real(T::zero(), T::zero())
    }

    /// Squared Euclidean norm `|x|^2 + |y|^2` (the beam's power).
    pub fn norm_sqr(&self) -> T {
        self.x.norm_sqr() + self.y.norm_sqr()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            x: self.x * s,
            y: self.y * s,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            x: self.x + other.x,
            y: self.y + other.y,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            x: self.x - other.x,
            y: self.y - other.y,
        }
    }

    /// Unit vector along `self`. Returns `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n == T::zero() {
            None
        } else {
            Some(self.scale(C::new(T::one() / n, T::zero())))
        }
    }
}

/// Conjugate-linear inner product `<a, b>`; conjugation falls on the FIRST
/// argument, so `inner(a, a)` is the real power of `a`.
pub fn inner<T: Real>(a: &Vec2C<T>, b: &Vec2C<T>) -> C<T> {
    a.x.conj() * b.x + a.y.conj() * b.y
}

/// Projection of `b` onto the line spanned by `axis`.
///
/// The axis need not be normalized; the projector is
/// `axis <axis, b> / |axis|^2`.
pub fn project<T: Real>(axis: &Vec2C<T>, b: &Vec2C<T>) -> Vec2C<T> {
    let n2 = axis.norm_sqr();
    assert!(n2 > T::zero(), "cannot project onto the zero vector");
    let coeff = inner(axis, b) / C::new(n2, T::zero());
    axis.scale(coeff)
}

// ---------------------------------------------------------------------------
// Measurement bases
// ---------------------------------------------------------------------------

/// Standard analyzer axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis<T: Real> {
    /// Diagonal `(e_x + e_y)/sqrt(2)`, i.e. linear at +45 degrees.
    Plus,
    /// Anti-diagonal `(e_x - e_y)/sqrt(2)`, linear at -45 degrees.
    Minus,
    /// Right circular `(e_x + i e_y)/sqrt(2)`.
    RightCirc,
    /// Left circular `(e_x - i e_y)/sqrt(2)`.
    LeftCirc,
    /// Linear polarization at angle `theta` from `e_x`.
    Linear(T),
}

/// Unit vector for a standard analyzer axis.
pub fn basis_vec<T: Real>(basis: Basis<T>) -> Vec2C<T> {
    let h = T::FRAC_1_SQRT_2();
    let z = T::zero();
    match basis {
        Basis::Plus => Vec2C::from_real(h, h),
        Basis::Minus => Vec2C::from_real(h, -h),
        Basis::RightCirc => Vec2C::new(C::new(h, z), C::new(z, h)),
        Basis::LeftCirc => Vec2C::new(C::new(h, z), C::new(z, -h)),
        Basis::Linear(theta) => Vec2C::from_angle(theta),
    }
}

// ---------------------------------------------------------------------------
// Tensor-product states
// ---------------------------------------------------------------------------

/// Amplitude vector over `k` two-component slots.
///
/// Index bit layout: slot 1 is the most significant bit, bit value 0 means
/// the `x` component and 1 the `y` component. A 0-slot state is a scalar
/// (one amplitude), which is what a fully projected state collapses to.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorState<T: Real> {
    slots: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> TensorState<T> {
    /// Scalar state (zero slots) holding a single amplitude.
    pub fn scalar(value: C<T>) -> Self {
        Self {
            slots: 0,
            amps: vec![value],
        }
    }

    /// One-slot state from a field vector.
    pub fn from_vec2(v: &Vec2C<T>) -> Self {
        Self {
            slots: 1,
            amps: vec![v.x, v.y],
        }
    }

    /// Product state `parts[0] (x) parts[1] (x) ...`.
    pub fn product(parts: &[Vec2C<T>]) -> Self {
        let mut state = Self::scalar(C::new(T::one(), T::zero()));
        for p in parts {
            state = state.tensor(&Self::from_vec2(p));
        }
        state
    }

    pub fn zero(slots: usize) -> Self {
        Self {
            slots,
            amps: vec![C::new(T::zero(), T::zero()); 1 << slots],
        }
    }

    pub fn from_amps(slots: usize, amps: Vec<C<T>>) -> Self {
        assert_eq!(amps.len(), 1 << slots, "amplitude count must be 2^slots");
        Self { slots, amps }
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn amps(&self) -> &[C<T>] {
        &self.amps
    }

    /// The single amplitude of a 0-slot state.
    pub fn scalar_value(&self) -> C<T> {
        assert_eq!(self.slots, 0, "scalar_value on a state with slots");
        self.amps[0]
    }

    /// Tensor product; `self`'s slots stay most significant.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(*a * *b);
            }
        }
        Self {
            slots: self.slots + other.slots,
            amps,
        }
    }

    /// Conjugate-linear inner product; conjugation on `self`.
    pub fn inner(&self, other: &Self) -> Result<C<T>, LinalgError> {
        if self.slots != other.slots {
            return Err(LinalgError::DimensionMismatch {
                left: self.slots,
                right: other.slots,
            });
        }
        let mut acc = C::new(T::zero(), T::zero());
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc = acc + a.conj() * *b;
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).fold(T::zero(), |s, v| s + v)
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            slots: self.slots,
            amps: self.amps.iter().map(|a| *a * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.slots != other.slots {
            return Err(LinalgError::DimensionMismatch {
                left: self.slots,
                right: other.slots,
            });
        }
        Ok(Self {
            slots: self.slots,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| *a + *b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        Ok(self.add(&other.scale(C::new(-T::one(), T::zero())))?)
    }

    /// Largest amplitude magnitude; handy for residual checks.
    pub fn max_abs(&self) -> T {
        self.amps
            .iter()
            .map(|a| a.norm())
            .fold(T::zero(), |m, v| if v > m { v } else { m })
    }

    /// Contracts slot `slot` (1-based) against `axis`, removing it.
    ///
    /// The axis enters conjugated, matching [`inner`]: projecting every slot
    /// in turn yields `<axis_1 (x) ... (x) axis_k, state>`.
    pub fn partial_project(&self, slot: usize, axis: &Vec2C<T>) -> Result<Self, LinalgError> {
        if slot == 0 || slot > self.slots {
            return Err(LinalgError::SlotOutOfRange {
                slot,
                slots: self.slots,
            });
        }
        let k = self.slots;
        let bit = k - slot; // bit position of this slot within an index
        let ux = axis.x.conj();
        let uy = axis.y.conj();
        let len = 1usize << (k - 1);
        let mut amps = Vec::with_capacity(len);
        let low_mask = (1usize << bit) - 1;
        for r in 0..len {
            let high = (r >> bit) << (bit + 1);
            let low = r & low_mask;
            let i0 = high | low;
            let i1 = i0 | (1usize << bit);
            amps.push(ux * self.amps[i0] + uy * self.amps[i1]);
        }
        Ok(Self {
            slots: k - 1,
            amps,
        })
    }

    /// Applies a 2x2 operator to one slot, leaving the others alone.
    pub fn apply_one(&self, slot: usize, m: &Mat<C<T>>) -> Result<Self, LinalgError> {
        assert_eq!(m.dim(), 2, "apply_one takes a 2x2 operator");
        if slot == 0 || slot > self.slots {
            return Err(LinalgError::SlotOutOfRange {
                slot,
                slots: self.slots,
            });
        }
        let bit = self.slots - slot;
        let mut amps = self.amps.clone();
        let step = 1usize << bit;
        let mut base = 0usize;
        while base < amps.len() {
            for low in base..base + step {
                let i0 = low;
                let i1 = low | step;
                let a0 = self.amps[i0];
                let a1 = self.amps[i1];
                amps[i0] = *m.get(0, 0) * a0 + *m.get(0, 1) * a1;
                amps[i1] = *m.get(1, 0) * a0 + *m.get(1, 1) * a1;
            }
            base += 2 * step;
        }
        Ok(Self {
            slots: self.slots,
            amps,
        })
    }
}

// ---------------------------------------------------------------------------
// Generic square matrices
// ---------------------------------------------------------------------------

/// Dense square matrix over any [`Num`] scalar (row-major storage).
///
/// Instantiated with `i64` and `Complex<i64>` for the exact no-go checks and
/// with `Complex<f64>` for wave plates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat<S> {
    n: usize,
    a: Vec<S>,
}

impl<S: Num + Copy> Mat<S> {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![S::zero(); n * n];
        for i in 0..n {
            a[i * n + i] = S::one();
        }
        Self { n, a }
    }

    pub fn from_rows(rows: &[&[S]]) -> Self {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            a.extend_from_slice(row);
        }
        Self { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.a[i * self.n + j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut a = vec![S::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == S::zero() {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] = a[i * n + j] + aik * other.a[k * n + j];
                }
            }
        }
        Self { n, a }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Kronecker product; `self` indexes the coarse blocks.
    pub fn kron(&self, other: &Self) -> Self {
        let n = self.n * other.n;
        let mut a = vec![S::zero(); n * n];
        for i1 in 0..self.n {
            for j1 in 0..self.n {
                let s = self.a[i1 * self.n + j1];
                for i2 in 0..other.n {
                    for j2 in 0..other.n {
                        let i = i1 * other.n + i2;
                        let j = j1 * other.n + j2;
                        a[i * n + j] = s * other.a[i2 * other.n + j2];
                    }
                }
            }
        }
        Self { n, a }
    }

    pub fn scale(&self, s: S) -> Self {
        Self {
            n: self.n,
            a: self.a.iter().map(|v| *v * s).collect(),
        }
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.n, "matrix-vector dimension mismatch");
        let mut out = vec![S::zero(); self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                out[i] = out[i] + self.a[i * self.n + j] * v[j];
            }
        }
        out
    }

    /// True if `self == sign * I` for `sign` in `{+1, -1}`; returns the sign.
    pub fn signed_identity(&self) -> Option<S>
    where
        S: std::ops::Neg<Output = S>,
    {
        let plus = Self::identity(self.n);
        if *self == plus {
            return Some(S::one());
        }
        if *self == plus.scale(-S::one()) {
            return Some(-S::one());
        }
        None
    }
}

impl<S: Num + Copy + std::ops::Neg<Output = S>> Mat<S> {
    pub fn neg(&self) -> Self {
        self.scale(-S::one())
    }
}

/// Applies a 2x2 complex matrix to a field vector.
pub fn apply2<T: Real>(m: &Mat<C<T>>, v: &Vec2C<T>) -> Vec2C<T> {
    assert_eq!(m.dim(), 2);
    Vec2C {
        x: *m.get(0, 0) * v.x + *m.get(0, 1) * v.y,
        y: *m.get(1, 0) * v.x + *m.get(1, 1) * v.y,
    }
}

// ---------------------------------------------------------------------------
// Exact operator constructors
// ---------------------------------------------------------------------------

/// Gaussian integer.
pub type Gi = Complex<i64>;

/// Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

/// Exact 2x2 Pauli matrix over Gaussian integers.
pub fn pauli(axis: PauliAxis) -> Mat<Gi> {
    let o = Gi::new(1, 0);
    let z = Gi::new(0, 0);
    let i = Gi::new(0, 1);
    match axis {
        PauliAxis::I => Mat::from_rows(&[&[o, z], &[z, o]]),
        PauliAxis::X => Mat::from_rows(&[&[z, o], &[o, z]]),
        PauliAxis::Y => Mat::from_rows(&[&[z, -i], &[i, z]]),
        PauliAxis::Z => Mat::from_rows(&[&[o, z], &[z, -o]]),
    }
}

/// Two-particle operator `a (x) b` as an exact 4x4 matrix.
pub fn two_qubit(a: &Mat<Gi>, b: &Mat<Gi>) -> Mat<Gi> {
    a.kron(b)
}

/// Coordinate axis label for spatial rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis3 {
    X,
    Y,
    Z,
}

/// Exact right-handed rotation by 90 degrees about a coordinate axis.
pub fn rot3(axis: Axis3) -> Mat<i64> {
    match axis {
        Axis3::X => Mat::from_rows(&[&[1, 0, 0], &[0, 0, -1], &[0, 1, 0]]),
        Axis3::Y => Mat::from_rows(&[&[0, 0, 1], &[0, 1, 0], &[-1, 0, 0]]),
        Axis3::Z => Mat::from_rows(&[&[0, -1, 0], &[1, 0, 0], &[0, 0, 1]]),
    }
}
