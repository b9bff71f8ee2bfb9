use num_complex::Complex;

use crate::branch::Jet2;
use crate::error::{Error, Result};
use crate::scalar::{c, Scalar};

/// The T-periodic angular phase Phi with Phi' = f, T = pi/(n+k).
///
/// f is -4k on the outer fifths of each period. On the middle window it rises
/// through a half-cosine ramp of width `ramp` to the plateau 5k and falls back
/// symmetrically; the plateau length is fixed by the zero-mean condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularProfile<T> {
    pub n: u64,
    pub k: u64,
    pub period: T,
    pub ramp: T,
}

struct Local<T> {
    phi: T,
    f: T,
    fp: T,
}

impl<T: Scalar> AngularProfile<T> {
    pub fn new(n: u64, k: u64) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::Index(format!("angular profile needs n, k >= 1 (n={n}, k={k})")));
        }
        let period = T::PI() / T::from_u64(n + k).unwrap();
        Ok(Self { n, k, period, ramp: period * c(7.0 / 45.0) })
    }

    fn kf(&self) -> T {
        T::from_u64(self.k).unwrap()
    }

    /// Height of the middle-window bump above the -4k floor.
    pub fn bump(&self) -> T {
        self.kf() * c(9.0)
    }

    /// Index of the nearest window centre phi_m = m T and the offset from it,
    /// offset in [-T/2, T/2).
    pub fn classify(&self, phi: T) -> (i64, T) {
        let m = (phi / self.period + c(0.5)).floor();
        (m.to_i64().unwrap_or(0), phi - m * self.period)
    }

    pub fn window_center(&self, m: i64) -> T {
        T::from_i64(m).unwrap() * self.period
    }

    /// |phi - phi_m| <= T/5 for some m.
    pub fn in_window(&self, phi: T) -> bool {
        self.classify(phi).1.abs() <= self.period * c(0.2)
    }

    /// phi in [phi_m + T/5, phi_m + 4T/5] for some m.
    pub fn in_sector(&self, phi: T) -> bool {
        let loc = self.reduce(phi);
        loc >= self.period * c(0.2) && loc <= self.period * c(0.8)
    }

    /// phi mod T in [0, T).
    pub fn reduce(&self, phi: T) -> T {
        let m = (phi / self.period).floor();
        let loc = phi - m * self.period;
        if loc >= self.period || loc < T::zero() {
            T::zero()
        } else {
            loc
        }
    }

    fn local(&self, loc: T) -> Local<T> {
        let t = self.period;
        let k4 = self.kf() * c(4.0);
        let h = self.bump();
        let a = self.ramp;
        let len = t * c(0.6);
        let start = t * c(0.2);
        let half = c::<T>(0.5);
        let pi = T::PI();
        let x = loc - start;
        let (g, gp, gi) = if x <= T::zero() {
            (T::zero(), T::zero(), T::zero())
        } else if x >= len {
            (T::zero(), T::zero(), h * (len - a))
        } else if x <= a {
            let th = pi * x / a;
            (h * half * (T::one() - th.cos()), h * pi * half / a * th.sin(), h * half * (x - a / pi * th.sin()))
        } else if x < len - a {
            (h, T::zero(), h * a * half + h * (x - a))
        } else {
            let y = len - x;
            let th = pi * y / a;
            (
                h * half * (T::one() - th.cos()),
                -h * pi * half / a * th.sin(),
                h * (len - a) - h * half * (y - a / pi * th.sin()),
            )
        };
        Local { phi: -k4 * loc + gi, f: -k4 + g, fp: gp }
    }

    pub fn f(&self, phi: T) -> T {
        self.local(self.reduce(phi)).f
    }

    pub fn f_prime(&self, phi: T) -> T {
        self.local(self.reduce(phi)).fp
    }

    pub fn phase(&self, phi: T) -> T {
        self.local(self.reduce(phi)).phi
    }

    /// Jet of Phi (angular only, real valued).
    pub fn phase_jet(&self, phi: T) -> Jet2<T> {
        let l = self.local(self.reduce(phi));
        let z = T::zero();
        Jet2::angular(Complex::new(l.phi, z), Complex::new(l.f, z), Complex::new(l.fp, z))
    }

    /// S(phi) = (2n + 2k) phi + Phi(phi).
    pub fn s_jet(&self, phi: T) -> Jet2<T> {
        let w = T::from_u64(2 * (self.n + self.k)).unwrap();
        let z = T::zero();
        let lin = Jet2::angular(Complex::new(w * phi, z), Complex::new(w, z), Complex::new(z, z));
        lin + self.phase_jet(phi)
    }

    /// Offsets within a period where f' is not differentiable.
    pub fn kinks(&self) -> [T; 4] {
        let t = self.period;
        [t * c(0.2), t * c(0.2) + self.ramp, t * c(0.8) - self.ramp, t * c(0.8)]
    }

    /// Exact supremum of |f'| (attained mid-ramp).
    pub fn max_slope(&self) -> T {
        self.bump() * T::PI() * c(0.5) / self.ramp
    }
}
