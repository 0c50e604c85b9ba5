//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra as na;
use num_traits as nt;

pub use num_complex::Complex;

/// Real floating point type the library is generic over (`f32` or `f64`).
pub trait Float:
    Copy
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + na::RealField
    + na::Scalar
    + 'static
{
    const ZERO: Self;
    const ONE: Self;
    const TWO: Self;
    const HALF: Self;
}

macro_rules! impl_float {
    ($f:ty) => {
        impl Float for $f {
            const ZERO: Self = 0.0;
            const ONE: Self = 1.0;
            const TWO: Self = 2.0;
            const HALF: Self = 0.5;
        }
    };
}

impl_float!(f32);
impl_float!(f64);

/// Complex scalar over a [`Float`].
pub type C<T> = Complex<T>;

/// Dense complex matrix.
pub type CMatrix<T> = na::DMatrix<Complex<T>>;
/// Dense complex column vector.
pub type CVector<T> = na::DVector<Complex<T>>;
/// Dense real matrix.
pub type RMatrix<T> = na::DMatrix<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Float>(x: f64) -> T {
    <T as nt::FromPrimitive>::from_f64(x).expect("f64 literal representable in T")
}

/// Converts a `usize` into `T`.
#[inline]
pub fn from_usize<T: Float>(x: usize) -> T {
    <T as nt::FromPrimitive>::from_usize(x).expect("usize representable in T")
}

#[inline]
pub fn to_f64<T: Float>(x: T) -> f64 {
    nt::ToPrimitive::to_f64(&x).unwrap_or(f64::NAN)
}

#[inline]
pub fn cre<T: Float>(re: T) -> Complex<T> {
    Complex::new(re, T::ZERO)
}

/// Squared modulus.
#[inline]
pub fn abs2<T: Float>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

/// Modulus without overflow-prone squaring.
#[inline]
pub fn cabs<T: Float>(z: Complex<T>) -> T {
    na::ComplexField::hypot(z.re, z.im)
}

/// Machine epsilon for `T`.
#[inline]
pub fn eps<T: Float>() -> T {
    T::default_epsilon()
}
