use serde::Serialize;

use crate::branch::Jet2;
use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// Quintic smoothstep 6s^5 - 15s^4 + 10s^3 and its first two derivatives.
/// C^2 across both ends.
pub fn smoothstep<T: Scalar>(s: T) -> (T, T, T) {
    if s <= T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    if s >= T::one() {
        return (T::one(), T::zero(), T::zero());
    }
    let s2 = s * s;
    let s3 = s2 * s;
    let v = s3 * (s * (s * c(6.0) - c(15.0)) + c(10.0));
    let d = s2 * (s * (s * c(30.0) - c(60.0)) + c(30.0));
    let dd = s * (s * (s * c(120.0) - c(180.0)) + c(60.0));
    (v, d, dd)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ramp<T> {
    pub lo: T,
    pub hi: T,
    pub delta: T,
}

/// A radial cutoff: `base` plus a sum of smoothstep ramps, or the complement
/// 1 - (that) when `complement` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cutoff<T> {
    pub base: T,
    pub ramps: Vec<Ramp<T>>,
    pub complement: bool,
}

impl<T: Scalar> Cutoff<T> {
    pub fn new(base: T, ramps: Vec<Ramp<T>>) -> Self {
        Self { base, ramps, complement: false }
    }

    pub fn complement_of(other: &Self) -> Self {
        Self { base: other.base, ramps: other.ramps.clone(), complement: !other.complement }
    }

    /// Value, first and second derivative at r.
    pub fn eval(&self, r: T) -> (T, T, T) {
        let (mut v, mut d, mut dd) = (self.base, T::zero(), T::zero());
        for rp in &self.ramps {
            let w = rp.hi - rp.lo;
            let (s0, s1, s2) = smoothstep((r - rp.lo) / w);
            v = v + rp.delta * s0;
            d = d + rp.delta * s1 / w;
            dd = dd + rp.delta * s2 / (w * w);
        }
        if self.complement {
            (T::one() - v, -d, -dd)
        } else {
            (v, d, dd)
        }
    }

    pub fn value(&self, r: T) -> T {
        self.eval(r).0
    }

    pub fn jet(&self, r: T) -> Jet2<T> {
        let (v, d, dd) = self.eval(r);
        Jet2::radial_real(v, d, dd)
    }

    /// All ramp endpoints, sorted.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut b: Vec<T> = self.ramps.iter().flat_map(|r| [r.lo, r.hi]).collect();
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b
    }
}

/// The cutoffs used on one step of an annulus.
///
/// Step families hold psi_1..psi_4 (psi_2 = 1 - psi_1); single families hold one
/// cutoff that is 1 before its transition and 0 after it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutoffFamily<T> {
    pub rho: T,
    pub members: Vec<Cutoff<T>>,
    /// Order of continuity of every member.
    pub smoothness: u32,
}

fn ramp<T: Scalar>(rho: T, s: T, lo: f64, hi: f64, delta: f64) -> Ramp<T> {
    Ramp { lo: rho + s * c(lo), hi: rho + s * c(hi), delta: c(delta) }
}

impl<T: Scalar> CutoffFamily<T> {
    fn check(rho: T) -> Result<T> {
        if !(rho > T::zero()) || !rho.is_finite() {
            return Err(Error::Config("cutoffs need rho > 0".into()));
        }
        Ok(rho.sqrt())
    }

    /// psi_1..psi_4 for the first step on [rho, rho + 2 sqrt(rho)].
    pub fn step1(rho: T) -> Result<Self> {
        let s = Self::check(rho)?;
        let psi1 = Cutoff::new(
            T::one(),
            vec![ramp(rho, s, 1.0 / 3.0, 2.0 / 3.0, -0.5), ramp(rho, s, 4.0 / 3.0, 5.0 / 3.0, -0.5)],
        );
        let psi2 = Cutoff::complement_of(&psi1);
        let psi3 = Cutoff::new(T::one(), vec![ramp(rho, s, 5.0 / 3.0, 1.9, -1.0)]);
        let psi4 = Cutoff::new(T::zero(), vec![ramp(rho, s, 0.1, 1.0 / 3.0, 1.0)]);
        Ok(Self { rho, members: vec![psi1, psi2, psi3, psi4], smoothness: 2 })
    }

    /// psi_1..psi_4 for the last step on [rho + 4 sqrt(rho), rho + 6 sqrt(rho)].
    pub fn step4(rho: T) -> Result<Self> {
        let s = Self::check(rho)?;
        let psi1 = Cutoff::new(
            T::one(),
            vec![ramp(rho, s, 13.0 / 3.0, 14.0 / 3.0, -0.5), ramp(rho, s, 16.0 / 3.0, 17.0 / 3.0, -0.5)],
        );
        let psi2 = Cutoff::complement_of(&psi1);
        let psi3 = Cutoff::new(T::one(), vec![ramp(rho, s, 17.0 / 3.0, 5.9, -1.0)]);
        let psi4 = Cutoff::new(T::zero(), vec![ramp(rho, s, 4.1, 13.0 / 3.0, 1.0)]);
        Ok(Self { rho, members: vec![psi1, psi2, psi3, psi4], smoothness: 2 })
    }

    /// A single cutoff equal to 1 for r <= rho + lo sqrt(rho) and 0 for
    /// r >= rho + hi sqrt(rho).
    pub fn single(rho: T, lo: f64, hi: f64) -> Result<Self> {
        let s = Self::check(rho)?;
        if !(lo < hi) {
            return Err(Error::Config("single cutoff needs lo < hi".into()));
        }
        Ok(Self {
            rho,
            members: vec![Cutoff::new(T::one(), vec![ramp(rho, s, lo, hi, -1.0)])],
            smoothness: 2,
        })
    }

    /// psi_i, 1-based.
    pub fn psi(&self, i: usize) -> &Cutoff<T> {
        &self.members[i - 1]
    }

    pub fn breakpoints(&self) -> Vec<T> {
        let mut b: Vec<T> = self.members.iter().flat_map(|m| m.breakpoints()).collect();
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.dedup();
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_is_c2() {
        let (v, d, dd) = smoothstep(0.0f64);
        assert_eq!((v, d, dd), (0.0, 0.0, 0.0));
        let (v, d, dd) = smoothstep(1.0f64 - 1e-12);
        assert!((v - 1.0).abs() < 1e-11 && d.abs() < 1e-9 && dd.abs() < 1e-9);
    }

    #[test]
    fn step1_table() {
        let rho = 900.0f64;
        let s = 30.0;
        let f = CutoffFamily::step1(rho).unwrap();
        assert_eq!(f.psi(1).value(rho + 0.2 * s), 1.0);
        assert_eq!(f.psi(1).value(rho + s), 0.5);
        assert_eq!(f.psi(1).value(rho + 1.8 * s), 0.0);
        assert_eq!(f.psi(3).value(rho + 1.6 * s), 1.0);
        assert_eq!(f.psi(3).value(rho + 1.95 * s), 0.0);
        assert_eq!(f.psi(4).value(rho + 0.05 * s), 0.0);
        assert_eq!(f.psi(4).value(rho + 0.4 * s), 1.0);
    }

    #[test]
    fn derivative_matches_difference() {
        let f = CutoffFamily::step4(1600.0f64).unwrap();
        let r = 1600.0 + 4.2 * 40.0;
        let h = 1e-4;
        let (_, d, dd) = f.psi(4).eval(r);
        let num = (f.psi(4).value(r + h) - f.psi(4).value(r - h)) / (2.0 * h);
        assert!((num - d).abs() < 1e-8);
        let (_, dp, _) = f.psi(4).eval(r + h);
        let (_, dm, _) = f.psi(4).eval(r - h);
        assert!(((dp - dm) / (2.0 * h) - dd).abs() < 1e-8);
    }
}
