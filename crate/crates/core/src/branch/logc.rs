use std::ops::{Div, Mul, Neg};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::complex::{ln_1p, principal_ln, wrap_phase};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A nonzero complex number stored as `exp(logmod + i phase)`.
///
/// The phase is carried unwrapped; only [`LogComplex::wrapped_phase`] and the
/// comparison helpers reduce it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex<T> {
    pub logmod: T,
    pub phase: T,
}

impl<T: Scalar> LogComplex<T> {
    pub fn one() -> Self {
        Self { logmod: T::zero(), phase: T::zero() }
    }

    pub fn new(logmod: T, phase: T) -> Self {
        Self { logmod, phase }
    }

    /// exp(w).
    pub fn exp(w: Complex<T>) -> Self {
        Self { logmod: w.re, phase: w.im }
    }

    /// The complex logarithm this value was built from.
    pub fn ln(&self) -> Complex<T> {
        Complex::new(self.logmod, self.phase)
    }

    pub fn from_complex(z: Complex<T>) -> Result<Self> {
        Ok(Self::exp(principal_ln(z)?))
    }

    /// x^e for x > 0.
    pub fn real_pow(x: T, e: T) -> Result<Self> {
        if !(x > T::zero()) {
            return Err(Error::Domain("real_pow of a non-positive base".into()));
        }
        Ok(Self { logmod: e * x.ln(), phase: T::zero() })
    }

    /// Linear value; overflows to infinity for logmod beyond the exponent range.
    pub fn to_complex(&self) -> Complex<T> {
        Complex::from_polar(self.logmod.exp(), self.phase)
    }

    pub fn modulus(&self) -> T {
        self.logmod.exp()
    }

    pub fn wrapped_phase(&self) -> T {
        wrap_phase(self.phase)
    }

    pub fn conj(&self) -> Self {
        Self { logmod: self.logmod, phase: -self.phase }
    }

    pub fn recip(&self) -> Self {
        Self { logmod: -self.logmod, phase: -self.phase }
    }

    pub fn powf(&self, e: T) -> Self {
        Self { logmod: self.logmod * e, phase: self.phase * e }
    }

    /// log(self / other) with the phase difference wrapped into (-pi, pi].
    pub fn ln_ratio(&self, other: &Self) -> Complex<T> {
        Complex::new(self.logmod - other.logmod, wrap_phase(self.phase - other.phase))
    }

    /// |self/other - 1|, the relative mismatch of two representations.
    pub fn rel_diff(&self, other: &Self) -> T {
        let w = self.ln_ratio(other);
        if w.re > c_ln_max::<T>() {
            return T::infinity();
        }
        let e = Complex::from_polar(w.re.exp(), w.im) - Complex::new(T::one(), T::zero());
        e.norm()
    }

    /// self + other in log space. `None` if the sum cancels to exactly zero.
    pub fn add(&self, other: &Self) -> Option<Self> {
        let (big, small) = if self.logmod >= other.logmod { (self, other) } else { (other, self) };
        let rel = small.ln() - big.ln();
        let ratio = Complex::from_polar(rel.re.exp(), rel.im);
        let l = ln_1p(ratio).ok()?;
        Some(Self { logmod: big.logmod + l.re, phase: big.phase + l.im })
    }
}

fn c_ln_max<T: Scalar>() -> T {
    T::max_value().ln()
}

impl<T: Scalar> Mul for LogComplex<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self { logmod: self.logmod + o.logmod, phase: self.phase + o.phase }
    }
}

impl<T: Scalar> Div for LogComplex<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Self { logmod: self.logmod - o.logmod, phase: self.phase - o.phase }
    }
}

impl<T: Scalar> Neg for LogComplex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { logmod: self.logmod, phase: self.phase + T::PI() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let z = Complex::new(-3.0, 4.0);
        let l = LogComplex::from_complex(z).unwrap();
        assert!((l.to_complex() - z).norm() < 1e-14);
        assert!(LogComplex::from_complex(Complex::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn huge_products_stay_finite() {
        let a = LogComplex::<f64>::new(5000.0, 1.0e5);
        let b = LogComplex::new(-4990.0, -1.0e5 + 0.5);
        let p = a * b;
        assert!((p.logmod - 10.0).abs() < 1e-12);
        assert!((p.wrapped_phase() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn add_and_cancel() {
        let a = LogComplex::new(800.0, 0.0);
        let b = -a;
        assert!(a.add(&b).is_none_or(|s| s.logmod < 800.0 - 30.0));
        let s = LogComplex::<f64>::one().add(&LogComplex::one()).unwrap();
        assert!((s.logmod - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rel_diff_wraps() {
        let a = LogComplex::new(1.0, 0.1);
        let b = LogComplex::new(1.0, 0.1 + 2.0 * std::f64::consts::PI * 1000.0);
        assert!(a.rel_diff(&b) < 1e-9);
    }
}
