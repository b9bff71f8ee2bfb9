use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Replaces a signed-zero imaginary part by +0 so that values produced by
/// real arithmetic land on the upper side of the cut.
#[inline]
pub fn normalize_zero<T: Scalar>(z: Complex<T>) -> Complex<T> {
    if z.im == T::zero() {
        Complex::new(z.re, T::zero())
    } else {
        z
    }
}

/// Principal square root, Re >= 0, with the negative real axis mapped to the
/// positive imaginary axis (sqrt(-1 + 0i) = i, also for a -0 imaginary part).
pub fn principal_sqrt<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let z = normalize_zero(z);
    if z.re == T::zero() && z.im == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    let m = z.re.hypot(z.im);
    let two = T::one() + T::one();
    let t = ((m + z.re.abs()) / two).sqrt();
    if z.re >= T::zero() {
        Complex::new(t, z.im / (two * t))
    } else {
        let im = if z.im < T::zero() { -t } else { t };
        Complex::new(z.im.abs() / (two * t), im)
    }
}

/// Principal logarithm, Im in (-pi, pi], same cut convention as
/// [`principal_sqrt`]. Zero is a domain error.
pub fn principal_ln<T: Scalar>(z: Complex<T>) -> Result<Complex<T>> {
    let z = normalize_zero(z);
    if z.re == T::zero() && z.im == T::zero() {
        return Err(Error::Domain("logarithm of zero".into()));
    }
    Ok(Complex::new(z.re.hypot(z.im).ln(), z.im.atan2(z.re)))
}

/// True when `z` sits strictly off the negative real axis but within the
/// ambiguity band, so that rounding could flip the branch.
pub fn near_cut<T: Scalar>(z: Complex<T>) -> bool {
    let z = normalize_zero(z);
    if z.re >= T::zero() || z.im == T::zero() {
        return false;
    }
    z.im.abs() <= T::cut_tol() * z.re.hypot(z.im)
}

/// Fails with a domain error when `z` is ambiguously close to the cut.
pub fn guard_cut<T: Scalar>(z: Complex<T>, what: &str) -> Result<()> {
    if near_cut(z) {
        return Err(Error::Domain(format!(
            "{what}: argument {:e}{:+e}i is within the cut ambiguity band",
            z.re.to_f64().unwrap_or(f64::NAN),
            z.im.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

/// log(1 + z) without cancellation for small |z|.
pub fn ln_1p<T: Scalar>(z: Complex<T>) -> Result<Complex<T>> {
    let u = Complex::new(T::one(), T::zero()) + z;
    let d = u - Complex::new(T::one(), T::zero());
    if d.re == T::zero() && d.im == T::zero() {
        return Ok(z);
    }
    Ok(principal_ln(u)? * (z / d))
}

/// Wraps an angle into (-pi, pi].
pub fn wrap_phase<T: Scalar>(p: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut q = p - (p / two_pi).round() * two_pi;
    if q <= -T::PI() {
        q = q + two_pi;
    } else if q > T::PI() {
        q = q - two_pi;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn sqrt_cut_convention() {
        let s = principal_sqrt(cx(-1.0, 0.0));
        assert_eq!(s, cx(0.0, 1.0));
        let s = principal_sqrt(cx(-1.0, -0.0));
        assert_eq!(s, cx(0.0, 1.0));
        let s = principal_sqrt(cx(-4.0, -1e-300));
        assert!(s.im < 0.0);
        assert_eq!(principal_sqrt(cx(0.0, 0.0)), cx(0.0, 0.0));
    }

    #[test]
    fn sqrt_squares_back() {
        for &(a, b) in &[(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (1e-200, 1e-200), (1e200, -1e200)] {
            let z = cx(a, b);
            let s = principal_sqrt(z);
            assert!(s.re >= 0.0);
            assert!(((s * s - z).norm()) <= 1e-15 * z.norm());
        }
    }

    #[test]
    fn ln_on_cut() {
        let l = principal_ln(cx(-2.0, -0.0)).unwrap();
        assert!((l.im - std::f64::consts::PI).abs() < 1e-15);
        assert!(principal_ln(cx(0.0, 0.0)).is_err());
    }

    #[test]
    fn ambiguity_band() {
        assert!(near_cut(cx(-1.0, 1e-14)));
        assert!(!near_cut(cx(-1.0, 0.0)));
        assert!(!near_cut(cx(-1.0, 1e-6)));
        assert!(guard_cut(cx(-1.0, -1e-15), "t").is_err());
    }

    #[test]
    fn ln1p_small() {
        let z = cx(1e-20, -3e-21);
        let l = ln_1p(z).unwrap();
        assert!((l - z).norm() < 1e-35);
        let z = cx(0.3, 0.2);
        let l = ln_1p(z).unwrap();
        let e = (cx(1.3, 0.2)).ln();
        assert!((l - e).norm() < 1e-15);
    }

    #[test]
    fn wrap() {
        let p = std::f64::consts::PI;
        assert!((wrap_phase(3.0 * p) - p).abs() < 1e-12);
        assert!((wrap_phase(-p) - p).abs() < 1e-12);
        assert!((wrap_phase(0.5f64) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn f32_sqrt() {
        let s = principal_sqrt(Complex::<f32>::new(-1.0, -0.0));
        assert_eq!(s, Complex::new(0.0f32, 1.0));
    }
}
