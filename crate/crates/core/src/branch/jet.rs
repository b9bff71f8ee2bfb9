use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Scalar;

/// Value and partial derivatives up to order two in polar coordinates (r, phi).
///
/// Used both for linear quantities and for logarithms of quantities; the
/// meaning is fixed by the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2<T> {
    pub v: Complex<T>,
    pub r: Complex<T>,
    pub p: Complex<T>,
    pub rr: Complex<T>,
    pub rp: Complex<T>,
    pub pp: Complex<T>,
}

impl<T: Scalar> Jet2<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { v: z, r: z, p: z, rr: z, rp: z, pp: z }
    }

    pub fn constant(v: Complex<T>) -> Self {
        Self { v, ..Self::zero() }
    }

    /// A function of r only.
    pub fn radial(v: Complex<T>, d: Complex<T>, dd: Complex<T>) -> Self {
        Self { v, r: d, rr: dd, ..Self::zero() }
    }

    /// A real function of r only.
    pub fn radial_real(v: T, d: T, dd: T) -> Self {
        let z = T::zero();
        Self::radial(Complex::new(v, z), Complex::new(d, z), Complex::new(dd, z))
    }

    /// A function of phi only.
    pub fn angular(v: Complex<T>, d: Complex<T>, dd: Complex<T>) -> Self {
        Self { v, p: d, pp: dd, ..Self::zero() }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            v: self.v * s,
            r: self.r * s,
            p: self.p * s,
            rr: self.rr * s,
            rp: self.rp * s,
            pp: self.pp * s,
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// f(self) given f, f', f'' at self.v.
    pub fn compose(&self, f0: Complex<T>, f1: Complex<T>, f2: Complex<T>) -> Self {
        Self {
            v: f0,
            r: f1 * self.r,
            p: f1 * self.p,
            rr: f2 * self.r * self.r + f1 * self.rr,
            rp: f2 * self.r * self.p + f1 * self.rp,
            pp: f2 * self.p * self.p + f1 * self.pp,
        }
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    /// Logarithm with the principal value at self.v; derivatives do not depend
    /// on the branch.
    pub fn ln(&self) -> Self {
        let inv = self.v.inv();
        self.compose(self.v.ln(), inv, -inv * inv)
    }

    /// Polar Laplacian of a linear jet.
    pub fn laplacian(&self, r: T) -> Complex<T> {
        self.rr + self.r / r + self.pp / (r * r)
    }

    /// For a log-jet L = log u: (Delta u + lambda u) / u.
    pub fn helmholtz_quotient(&self, r: T, lambda: Complex<T>) -> Complex<T> {
        self.rr + self.r * self.r + self.r / r + (self.pp + self.p * self.p) / (r * r) + lambda
    }

    /// For a log-jet L = log u: the jet of u / exp(shift).
    pub fn exp_shifted(&self, shift: Complex<T>) -> Self {
        let e = (self.v - shift).exp();
        self.compose(e, e, e)
    }
}

impl<T: Scalar> Add for Jet2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            r: self.r + o.r,
            p: self.p + o.p,
            rr: self.rr + o.rr,
            rp: self.rp + o.rp,
            pp: self.pp + o.pp,
        }
    }
}

impl<T: Scalar> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { v: -self.v, r: -self.r, p: -self.p, rr: -self.rr, rp: -self.rp, pp: -self.pp }
    }
}

impl<T: Scalar> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = Complex::new(T::one() + T::one(), T::zero());
        Self {
            v: self.v * o.v,
            r: self.r * o.v + self.v * o.r,
            p: self.p * o.v + self.v * o.p,
            rr: self.rr * o.v + two * self.r * o.r + self.v * o.rr,
            rp: self.rp * o.v + self.r * o.p + self.p * o.r + self.v * o.rp,
            pp: self.pp * o.v + two * self.p * o.p + self.v * o.pp,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn product_rule_against_closed_form() {
        // f = r^2 e^{i 3 phi}
        let (r, p) = (1.7, 0.4);
        let a = Jet2::radial_real(r * r, 2.0 * r, 2.0);
        let e = cx(0.0, 3.0 * p).exp();
        let b = Jet2::angular(e, cx(0.0, 3.0) * e, cx(-9.0, 0.0) * e);
        let f = a * b;
        assert!((f.rp - cx(2.0 * r, 0.0) * cx(0.0, 3.0) * e).norm() < 1e-14);
        // harmonic: Laplacian of r^3 e^{3 i phi} is zero
        let a3 = Jet2::radial_real(r.powi(3), 3.0 * r * r, 6.0 * r);
        let h = a3 * b;
        assert!(h.laplacian(r).norm() < 1e-12);
    }

    #[test]
    fn exp_ln_roundtrip() {
        let j = Jet2 {
            v: cx(0.3, -0.2),
            r: cx(1.0, 0.5),
            p: cx(-0.25, 2.0),
            rr: cx(0.1, 0.0),
            rp: cx(0.0, 0.3),
            pp: cx(-1.0, 0.2),
        };
        let back = j.exp().ln();
        for (a, b) in [(back.v, j.v), (back.r, j.r), (back.pp, j.pp), (back.rp, j.rp)] {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn helmholtz_of_plane_mode() {
        // u = e^{i n phi} r^n is harmonic, so the quotient is lambda.
        let (r, n) = (2.0, 5.0);
        let l = Jet2 {
            v: cx(n * f64::ln(r), 0.0),
            r: cx(n / r, 0.0),
            p: cx(0.0, n),
            rr: cx(-n / (r * r), 0.0),
            ..Jet2::zero()
        };
        let q = l.helmholtz_quotient(r, cx(1.5, 0.25));
        assert!((q - cx(1.5, 0.25)).norm() < 1e-13);
    }
}
