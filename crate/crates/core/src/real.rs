//! Scalar abstraction shared by every numerical kernel in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar the simulation is generic over.
///
/// Implemented for `f32` and `f64`. All tolerances quoted in the tests assume
/// `f64`; `f32` is supported for quick exploratory runs.
pub trait Real:
    RealField + FftNum + Copy + Default + FromPrimitive + ToPrimitive + Display + LowerExp + Debug
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn c(x: f64) -> Self {
        Self::from_f64(x).expect("representable constant")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("representable count")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn half() -> Self {
        Self::c(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::c(2.0)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `e^{iθ}`.
#[inline]
pub fn cis<F: Real>(theta: F) -> Complex<F> {
    Complex::new(theta.cos(), theta.sin())
}

/// `i·z`.
#[inline]
pub fn times_i<F: Real>(z: Complex<F>) -> Complex<F> {
    Complex::new(-z.im, z.re)
}

/// Sum of `|z|²` over a slice.
#[inline]
pub fn norm_sqr_sum<F: Real>(v: &[Complex<F>]) -> F {
    v.iter().fold(F::zero(), |acc, z| acc + z.norm_sqr())
}

/// `Σ conj(a)·b`.
#[inline]
pub fn inner<F: Real>(a: &[Complex<F>], b: &[Complex<F>]) -> Complex<F> {
    a.iter()
        .zip(b)
        .fold(Complex::new(F::zero(), F::zero()), |acc, (x, y)| acc + x.conj() * y)
}
