use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the branch and angular kernels are written against.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative width of the band around the negative real axis inside which a
    /// branch choice is considered ambiguous.
    fn cut_tol() -> Self {
        Self::from_f64(1e-12).unwrap().max(Self::epsilon() * Self::from_f64(64.0).unwrap())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[inline]
pub(crate) fn c<T: Scalar>(x: f64) -> T {
    T::from_f64(x).unwrap()
}
