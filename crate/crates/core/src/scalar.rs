//! Scalar abstractions.
//!
//! Two levels are used across the crate. [`Field`] is enough for everything
//! that is a rational function of the physical coefficients (the symbol
//! matrix, its characteristic polynomial, the Routh–Hurwitz chain and the
//! mode-change coefficients), so those routines also run in exact rational
//! arithmetic. [`Real`] adds the transcendental functions and FFT support
//! needed by the numerical parts.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::Neg;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, Num, NumAssign};
use rustfft::{FftDirection, FftPlanner};

/// An ordered field: exact rationals or floating point.
pub trait Field:
    Clone + Debug + PartialOrd + Num + Neg<Output = Self> + FromPrimitive + Send + Sync + 'static
{
    /// `n / d` as an element of the field.
    fn ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n).expect("integer fits the field") / Self::from_i64(d).expect("integer fits the field")
    }

    /// Integer literal.
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits the field")
    }

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl<T> Field for T where
    T: Clone + Debug + PartialOrd + Num + Neg<Output = T> + FromPrimitive + Send + Sync + 'static
{
}

/// Floating-point scalar used by the numerical routines (`f32` or `f64`).
pub trait Real:
    Field
    + Float
    + NumAssign
    + Copy
    + Default
    + Display
    + LowerExp
    + Sum
{
    /// One-dimensional complex FFT of length `n`, unnormalized in both
    /// directions.
    fn plan_fft(n: usize, direction: FftDirection) -> Arc<dyn LineFft<Self>>;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    fn two_pi() -> Self {
        Self::lit(std::f64::consts::TAU)
    }

    fn pi() -> Self {
        Self::lit(std::f64::consts::PI)
    }

    /// Unit roundoff of the type.
    fn unit_roundoff() -> Self {
        Float::epsilon()
    }
}

/// A planned 1-D transform applied in place to consecutive lines.
pub trait LineFft<T>: Send + Sync {
    fn len(&self) -> usize;
    /// Transforms every `len()`-sized chunk of `buf`.
    fn process(&self, buf: &mut [Complex<T>]);
}

struct RustFft<T: rustfft::FftNum>(Arc<dyn rustfft::Fft<T>>);

impl<T: rustfft::FftNum> LineFft<T> for RustFft<T> {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn process(&self, buf: &mut [Complex<T>]) {
        self.0.process(buf);
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn plan_fft(n: usize, direction: FftDirection) -> Arc<dyn LineFft<Self>> {
                Arc::new(RustFft(FftPlanner::<$t>::new().plan_fft(n, direction)))
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
