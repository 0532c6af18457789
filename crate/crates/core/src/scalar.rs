//! Scalar abstraction shared by every numeric routine.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Real field the geometry is computed over. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in T")
}

#[inline]
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

#[inline]
pub fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

#[inline]
pub fn from_c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    cplx(z.re, z.im)
}

/// exp(2πi·λ).
#[inline]
pub fn exp_2pi_i<T: Real>(lambda: Complex<T>) -> Complex<T> {
    (Complex::new(T::zero(), T::TAU()) * lambda).exp()
}

/// An `f64` tolerance moved to the precision of `T` keeping the same fraction of
/// significant digits: tol = ε₆₄^k maps to ε_T^k. Identity for `f64`.
#[inline]
pub fn scaled_tol<T: Real>(tol: f64) -> T {
    let eps = T::epsilon().to_f64().unwrap_or(f64::EPSILON);
    if eps <= f64::EPSILON {
        return lit(tol);
    }
    lit(eps.powf(tol.ln() / f64::EPSILON.ln()))
}
