//! Scalar abstractions.
//!
//! Numerical routines (root finding, residues, tracing) are generic over a
//! floating-point [`Real`]. Polynomial ring arithmetic is generic over any
//! [`Coefficient`], which additionally admits exact rationals so that
//! structural checks on characteristic polynomials can be done without
//! rounding.

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, ToPrimitive, Zero};
use std::fmt::{Debug, Display, LowerExp};
use std::ops::{Add, Mul, Neg, Sub};

/// Floating-point scalar used by the numerical algorithms: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for the supported types.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Scales a tolerance calibrated for `f64` to this type's precision.
    ///
    /// Tolerances in this crate are stated for double precision; for `f32`
    /// they grow by the ratio of machine epsilons.
    fn tol(x_for_f64: f64) -> Self {
        let ratio = Self::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
        Self::lit(x_for_f64 * ratio)
    }

    /// Like [`Real::tol`] but scales with the square root of the epsilon
    /// ratio, which is the accuracy regime of double roots.
    fn tol_sqrt(x_for_f64: f64) -> Self {
        let ratio = Self::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
        Self::lit(x_for_f64 * ratio.sqrt())
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Coefficient ring for [`crate::Polynomial`].
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Magnitude as `f64`, used for trimming and diagnostics.
    fn modulus(&self) -> f64;

    fn from_usize(n: usize) -> Self;

    /// Coefficients with `|c| <= threshold * max|c|` are treated as zero.
    /// Exact types return 0, so only true zeros are trimmed.
    fn trim_threshold() -> f64;
}

macro_rules! impl_float_coefficient {
    ($t:ty) => {
        impl Coefficient for $t {
            fn modulus(&self) -> f64 {
                self.abs() as f64
            }
            fn from_usize(n: usize) -> Self {
                n as $t
            }
            fn trim_threshold() -> f64 {
                <$t as Real>::tol(1e-14) as f64
            }
        }
    };
}

impl_float_coefficient!(f32);
impl_float_coefficient!(f64);

impl<T: Real> Coefficient for Complex<T> {
    fn modulus(&self) -> f64 {
        self.norm().to_f64_lossy()
    }
    fn from_usize(n: usize) -> Self {
        Complex::new(T::from_usize(n).expect("usize representable"), T::zero())
    }
    fn trim_threshold() -> f64 {
        T::tol(1e-14).to_f64_lossy()
    }
}

impl Coefficient for Ratio<i64> {
    fn modulus(&self) -> f64 {
        self.to_f64().map(f64::abs).unwrap_or(f64::INFINITY)
    }
    fn from_usize(n: usize) -> Self {
        Ratio::from_integer(n as i64)
    }
    fn trim_threshold() -> f64 {
        0.0
    }
}

/// Distance between two complex points where non-finite values stand for
/// the point at infinity: two infinite points coincide, a finite and an
/// infinite point are infinitely far apart.
pub fn projective_distance<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    let fa = a.re.is_finite() && a.im.is_finite();
    let fb = b.re.is_finite() && b.im.is_finite();
    match (fa, fb) {
        (true, true) => (a - b).norm(),
        (false, false) => T::zero(),
        _ => T::infinity(),
    }
}

pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub fn infinite_point<T: Real>() -> Complex<T> {
    Complex::new(T::infinity(), T::zero())
}
