use num_complex::Complex;

use super::complex::{guard_cut, ln_1p, normalize_zero, principal_ln, principal_sqrt};
use super::jet::Jet2;
use super::logc::LogComplex;
use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Radicands smaller than this (relative to one) are treated as turning points.
pub const TURNING_TOL: f64 = 1e-10;

/// mu_n(r) = exp(n [log(s + 1) - s - log 2 + 1]), s = sqrt(1 - lambda r^2/n^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuParams<T> {
    pub n: u64,
    pub lambda: Complex<T>,
}

struct Core<T> {
    x: Complex<T>,
    s: Complex<T>,
}

impl<T: Scalar> MuParams<T> {
    pub fn new(n: u64, lambda: Complex<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Index("mu needs n >= 1".into()));
        }
        Ok(Self { n, lambda })
    }

    fn nf(&self) -> T {
        T::from_u64(self.n).unwrap()
    }

    fn core(&self, r: T) -> Result<Core<T>> {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(Error::Domain(format!("mu_{}: bad radius", self.n)));
        }
        let n = self.nf();
        let x = normalize_zero(self.lambda * (r * r / (n * n)));
        let w = normalize_zero(Complex::new(T::one(), T::zero()) - x);
        guard_cut(w, "mu radicand")?;
        if w.norm() <= c(TURNING_TOL) {
            return Err(Error::Domain(format!(
                "mu_{}: turning point at r = {}",
                self.n,
                r.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Core { x, s: principal_sqrt(w) })
    }

    /// 1 - |lambda r^2 / n^2|; negative values mean the evaluation point lies
    /// past the classical region of this index.
    pub fn margin(&self, r: T) -> T {
        let n = self.nf();
        T::one() - self.lambda.norm() * r * r / (n * n)
    }

    /// log mu_n(r) as a complex number (real part = log modulus).
    pub fn ln_value(&self, r: T) -> Result<Complex<T>> {
        let k = self.core(r)?;
        let two = T::one() + T::one();
        // t = 1 - s, E = t + log(1 - t/2): cancellation free near r = 0.
        let t = k.x / (Complex::new(T::one(), T::zero()) + k.s);
        let e = t + ln_1p(-t / two)?;
        Ok(e * self.nf())
    }

    pub fn value(&self, r: T) -> Result<LogComplex<T>> {
        Ok(LogComplex::exp(self.ln_value(r)?))
    }

    /// Jet of log mu_n, a function of r only.
    pub fn ln_jet(&self, r: T) -> Result<Jet2<T>> {
        let k = self.core(r)?;
        let n = self.nf();
        let one = Complex::new(T::one(), T::zero());
        let ops = one + k.s;
        let v = self.ln_value(r)?;
        let d = self.lambda * r / (ops * n);
        let dd = self.lambda / (ops * n)
            + self.lambda * self.lambda * (r * r) / (k.s * ops * ops * (n * n * n));
        Ok(Jet2::radial(v, d, dd))
    }

    /// sqrt(n^2 - lambda r^2) on the same branch as mu.
    pub fn radical(&self, r: T) -> Result<Complex<T>> {
        Ok(self.core(r)?.s * self.nf())
    }
}

/// sqrt(m^2 - lambda r^2) with the principal branch and turning-point guard.
pub fn radical<T: Scalar>(m: u64, lambda: Complex<T>, r: T) -> Result<Complex<T>> {
    MuParams::new(m, lambda)?.radical(r)
}

/// Fails if sqrt(m^2 - lambda r^2) has a zero in [r0, r1]. For non-real lambda
/// the radicand never vanishes at r > 0.
pub fn turning_point_check<T: Scalar>(m: u64, lambda: Complex<T>, r0: T, r1: T) -> Result<()> {
    let mf = T::from_u64(m).unwrap();
    let w = |r: T| T::one() - lambda.re * r * r / (mf * mf);
    if lambda.im == T::zero() {
        let (a, b) = (w(r0), w(r1));
        let tol = c::<T>(TURNING_TOL);
        if a.abs() <= tol || b.abs() <= tol || (a > T::zero()) != (b > T::zero()) {
            return Err(Error::Domain(format!(
                "turning point of index {} inside [{}, {}]",
                m,
                r0.to_f64().unwrap_or(f64::NAN),
                r1.to_f64().unwrap_or(f64::NAN)
            )));
        }
    }
    Ok(())
}

/// phi_{a,b}(r) = -1/4 log(2 q_a q_b + 2 lambda r^2 - a^2 - b^2), returned as a
/// radial jet. The argument is evaluated as -(q_a - q_b)^2.
pub fn phi_ab<T: Scalar>(a: u64, b: u64, lambda: Complex<T>, r: T) -> Result<Jet2<T>> {
    if a == b {
        return Err(Error::Domain(format!("phi_{{a,b}} with a = b = {a} is degenerate")));
    }
    let qa = radical(a, lambda, r)?;
    let qb = radical(b, lambda, r)?;
    let diff = qa - qb;
    if diff.norm() == T::zero() {
        return Err(Error::Domain("phi_{a,b}: q_a = q_b".into()));
    }
    let x = normalize_zero(-(diff * diff));
    guard_cut(x, "phi_{a,b} argument")?;
    let quarter = c::<T>(0.25);
    let half = c::<T>(0.5);
    let v = -principal_ln(x)? * quarter;
    let p = qa * qb;
    let d = -lambda * r * half / p;
    let dd = -lambda * half / p
        - lambda * lambda * (r * r) * (qa * qa + qb * qb) * half / (p * p * p);
    Ok(Jet2::radial(v, d, dd))
}

/// Samples the argument of log in phi_{a,b} along [r0, r1] and fails if it
/// crosses or grazes the negative real axis.
pub fn phi_ab_path_check<T: Scalar>(
    a: u64,
    b: u64,
    lambda: Complex<T>,
    r0: T,
    r1: T,
    samples: usize,
) -> Result<()> {
    let mut prev: Option<Complex<T>> = None;
    for i in 0..=samples {
        let r = r0 + (r1 - r0) * T::from_usize(i).unwrap() / T::from_usize(samples).unwrap();
        let qa = radical(a, lambda, r)?;
        let qb = radical(b, lambda, r)?;
        let d = qa - qb;
        let x = normalize_zero(-(d * d));
        guard_cut(x, "phi_{a,b} path")?;
        if let Some(p) = prev {
            let crosses = p.re < T::zero()
                && x.re < T::zero()
                && p.im != T::zero()
                && x.im != T::zero()
                && (p.im > T::zero()) != (x.im > T::zero());
            if crosses {
                return Err(Error::Domain(format!("phi_{{{a},{b}}} argument crosses the cut")));
            }
        }
        prev = Some(x);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn degenerate_lambda_zero() {
        let m = MuParams::new(800, cx(0.0, 0.0)).unwrap();
        let v = m.value(517.0).unwrap();
        assert_eq!(v.logmod, 0.0);
        assert_eq!(v.phase, 0.0);
    }

    #[test]
    fn turning_point_rejected() {
        let m = MuParams::new(697, cx(1.0, 0.0)).unwrap();
        assert!(m.value(697.0).is_err());
        assert!(turning_point_check(697, cx(1.0, 0.0), 657.0, 760.0).is_err());
        assert!(turning_point_check(697, cx(1.0, 0.0), 700.0, 760.0).is_ok());
        assert!(turning_point_check(697, cx(1.0, 0.5), 657.0, 760.0).is_ok());
    }

    #[test]
    fn mu_past_classical_region_is_defined() {
        // 320 < r: radicand negative real, s = i|s|, |mu| = 1 exactly? no, but finite
        let m = MuParams::new(320, cx(1.0, 0.0)).unwrap();
        let v = m.ln_value(410.0).unwrap();
        assert!(v.re.is_finite() && v.im.is_finite());
        assert!(m.margin(410.0) < 0.0);
    }

    #[test]
    fn phi_ab_rejects_equal_indices() {
        assert!(phi_ab(800, 800, cx(1.0, 0.0), 410.0).is_err());
    }

    #[test]
    fn phi_ab_derivative_identity() {
        // phi' = -lambda r / (2 q_a q_b)
        let j = phi_ab(800, 320, cx(1.0, 0.0), 410.0).unwrap();
        let qa = radical(800, cx(1.0, 0.0), 410.0).unwrap();
        let qb = radical(320, cx(1.0, 0.0), 410.0).unwrap();
        let e = -cx(410.0, 0.0) / (qa * qb * 2.0);
        assert!((j.r - e).norm() < 1e-15);
    }
}
