//! Floating-point scalar abstraction shared by the analytic layers.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar type the analytic code is generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    /// `max(floor, 16 ulp)`: tolerance that degrades gracefully for `f32`.
    fn tol(floor: f64) -> Self {
        Self::lit(floor).max(Self::epsilon() * Self::lit(16.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over a [`Scalar`].
pub type C<S> = Complex<S>;

pub(crate) fn c<S: Scalar>(re: S, im: S) -> C<S> {
    Complex::new(re, im)
}

pub(crate) fn finite<S: Scalar>(z: C<S>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
