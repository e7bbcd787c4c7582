//! Floating-point abstraction so the whole model can run in `f32` or `f64`.
//!
//! Everything numeric in this crate is generic over [`Scalar`]. The crate
//! root exports `f64`-backed aliases which are what the CLI and most users
//! want; `f32` instantiation exists for memory-bound simulation sweeps and
//! as a cheap way to smoke-test numerical conditioning.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::float::FloatConst;
use num_traits::{Float, NumAssign};

pub trait Scalar:
    Float + FloatConst + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64` (identity for `f64`, rounding for `f32`).
    fn of(x: f64) -> Self;

    /// Widening conversion to `f64` (identity for `f64`).
    fn as_f64(self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}
