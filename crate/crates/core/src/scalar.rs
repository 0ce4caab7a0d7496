//! Floating-point abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar backing amplitudes and density-matrix entries (f32 or f64).
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance for normalization and unitarity checks at this precision.
    const VALIDATION_TOL: f64;

    fn from_f64_lossy(value: f64) -> Self {
        Self::from_f64(value).expect("f64 converts to every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }
}

impl Scalar for f64 {
    const VALIDATION_TOL: f64 = 1e-10;
}

impl Scalar for f32 {
    const VALIDATION_TOL: f64 = 1e-5;
}

/// Shorthand for the complex amplitude type.
pub type Amplitude<T> = Complex<T>;

pub(crate) fn c<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
}

pub(crate) fn is_finite<T: Scalar>(z: &Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
