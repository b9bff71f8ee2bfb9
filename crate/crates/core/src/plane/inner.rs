use num_complex::Complex;

use crate::angular::smoothstep;
use crate::annulus::{FieldPoint, Mode, PotentialRule, RegionClass};
use crate::MuParams;
use crate::error::{Error, Result};
use crate::{Cplx, Jet2};

/// u0 = g0 e^{-i n1 phi} mu_{n1} on 0 < r <= rho_1 with g0 = r^{(2 chi - 1) n1}.
///
/// chi is a C^2 step: 1 on (0, 0.4 rho_1], 0 on [0.6 rho_1, rho_1], so u0 is
/// r^{n1} e^{-i n1 phi} mu_{n1} near the origin and matches the first annulus at
/// rho_1.
#[derive(Debug, Clone, Copy)]
pub struct InnerDisk {
    pub n1: u64,
    pub lambda: Cplx,
    pub rho1: f64,
    pub mode: Mode,
    mu: MuParams,
}

impl InnerDisk {
    pub fn new(n1: u64, lambda: Cplx, rho1: f64, mode: Mode) -> Result<Self> {
        if !(rho1 > 0.0) {
            return Err(Error::Config("rho1 must be positive".into()));
        }
        Ok(Self { n1, lambda, rho1, mode, mu: MuParams::new(n1, lambda)? })
    }

    /// chi and its first two derivatives.
    pub fn chi(&self, r: f64) -> (f64, f64, f64) {
        let (lo, hi) = (0.4 * self.rho1, 0.6 * self.rho1);
        let w = hi - lo;
        let (s, ds, dds) = smoothstep((r - lo) / w);
        (1.0 - s, -ds / w, -dds / (w * w))
    }

    pub fn field_point(&self, r: f64, phi: f64) -> Result<FieldPoint> {
        if !(r > 0.0) || r > self.rho1 {
            return Err(Error::OutOfDomain(format!("r = {r} outside the inner disk")));
        }
        let n = self.n1 as f64;
        let (c, dc, ddc) = self.chi(r);
        let e = (2.0 * c - 1.0) * n;
        let de = 2.0 * dc * n;
        let dde = 2.0 * ddc * n;
        let lr = r.ln();
        // log g0 = e(r) ln r
        let lg = Jet2::radial_real(e * lr, de * lr + e / r, dde * lr + 2.0 * de / r - e / (r * r));
        let ang = Jet2::angular(Cplx::new(0.0, -n * phi), Cplx::new(0.0, -n), Complex::new(0.0, 0.0));
        let rule = if self.mode.is_vector() { PotentialRule::Tangential } else { PotentialRule::FromResidual };
        let mut fp = FieldPoint::new(r, phi, self.lambda, RegionClass::InnerDisk, rule);
        fp.push(lg + ang + self.mu.ln_jet(r)?);
        Ok(fp)
    }

    /// |u0| does not depend on phi, so the angular maximum is any sample.
    pub fn ln_grid_max(&self, r: f64) -> Result<f64> {
        Ok(self.field_point(r, 0.0)?.value()?.logmod)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::{cx, PotentialValue};

    #[test]
    fn harmonic_zone_potential_vanishes_for_lambda_zero() {
        let d = InnerDisk::new(1800, cx(0.0, 0.0), 900.0, Mode::MeshN).unwrap();
        for r in [50.0, 120.0, 300.0, 359.0] {
            let fp = d.field_point(r, 0.3).unwrap();
            let l = fp.log_jet().unwrap();
            let q = l.helmholtz_quotient(r, cx(0.0, 0.0));
            let scale = l.r.norm_sqr() + (l.p.norm_sqr()) / (r * r);
            assert!(q.norm() <= 1e-10 * scale, "r = {r}: {}", q.norm());
            let PotentialValue::Scalar(v) = fp.potential().unwrap() else { unreachable!() };
            assert!(v.norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn chi_table() {
        let d = InnerDisk::new(1800, cx(1.0, 0.0), 900.0, Mode::MeshN).unwrap();
        assert_eq!(d.chi(100.0).0, 1.0);
        assert_eq!(d.chi(360.0).0, 1.0);
        assert_eq!(d.chi(540.0).0, 0.0);
        assert_eq!(d.chi(900.0).0, 0.0);
    }
}
