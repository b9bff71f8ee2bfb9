//! Piecewise envelope ln M(r) and angular maxima ln m(r).

use super::AnnulusSolution;
use crate::branch::phi_ab;
use crate::error::Result;

impl AnnulusSolution {
    /// ln M(r): log-modulus of the dominant term on each sub-interval,
    /// including the exp(psi phi_{a,b}) and h factors.
    pub fn ln_envelope(&self, r: f64) -> Result<f64> {
        self.piece(r)?;
        let (n, k) = (self.params.n, self.params.k);
        let lam = self.params.lambda;
        let with_phi = self.params.mode.uses_phi_factors();
        let s = self.sqrt_rho();
        let x = (r - self.rho()) / s;
        let lr = r.ln();
        let lower = |extra: f64| -> Result<f64> {
            Ok(self.b.logmod - (n - 2 * k) as f64 * lr + self.mu_lo.ln_value(r)?.re + extra)
        };
        let v = if x < 1.0 {
            let e = if with_phi { self.step1.psi(4).value(r) * phi_ab(n, n - 2 * k, lam, r)?.v.re } else { 0.0 };
            -(n as f64) * lr + self.mu_n.ln_value(r)?.re + e
        } else if x < 2.0 {
            let e = if with_phi { self.step1.psi(3).value(r) * phi_ab(n, n - 2 * k, lam, r)?.v.re } else { 0.0 };
            lower(e)?
        } else if x < 3.0 {
            lower(0.0)?
        } else if x < 4.0 {
            lower(self.ln_h(r)?.v.re)?
        } else if x < 5.0 {
            let e = if with_phi {
                self.step4.psi(4).value(r) * phi_ab(n + k, n + 2 * k, lam, r)?.v.re
            } else {
                0.0
            };
            self.b1.logmod - (n + 2 * k) as f64 * lr + self.mu_hi.ln_value(r)?.re + e
        } else {
            let e = if with_phi {
                self.step4.psi(3).value(r) * phi_ab(n + k, n + 2 * k, lam, r)?.v.re
            } else {
                0.0
            };
            self.a.logmod - (n + k) as f64 * lr + self.mu_out.ln_value(r)?.re + e
        };
        Ok(v)
    }

    /// Angular grid of 8(n + k) equispaced directions.
    pub fn angle_count(&self) -> usize {
        8 * (self.params.n + self.params.k) as usize
    }

    /// ln m(r) = max over `count` equispaced angles of ln|u(r, phi)|.
    pub fn ln_grid_max(&self, r: f64, count: usize) -> Result<f64> {
        let mut best = f64::NEG_INFINITY;
        let step = std::f64::consts::TAU / count as f64;
        for i in 0..count {
            let v = self.field_point(r, i as f64 * step)?.value()?;
            best = best.max(v.logmod);
        }
        Ok(best)
    }

    /// ln m(rho + 6 sqrt(rho)) - ln m(rho) on the standard angular grid.
    pub fn decay_increment(&self) -> Result<f64> {
        let c = self.angle_count();
        Ok(self.ln_grid_max(self.outer(), c)? - self.ln_grid_max(self.rho(), c)?)
    }
}

#[cfg(test)]
mod tests {
    use crate::annulus::{cx, AnnulusParams, AnnulusSolution, Mode};

    #[test]
    fn envelope_starts_at_the_mode_and_dominates() {
        let s = AnnulusSolution::build(AnnulusParams::from_ladder(900.0, cx(1.0, 0.0), Mode::MeshN).unwrap())
            .unwrap();
        let m0 = s.ln_grid_max(900.0, 64).unwrap();
        assert!((s.ln_envelope(900.0).unwrap() - m0).abs() < 1e-9);
        let q = s.sqrt_rho();
        for i in 0..60 {
            let r = 900.0 + (i as f64 + 0.37) * 0.1 * q;
            let m = s.ln_grid_max(r, 512).unwrap();
            assert!(m <= s.ln_envelope(r).unwrap() + 1e-9, "r = {r}");
        }
    }

    #[test]
    fn envelope_is_continuous_at_its_branch_points() {
        let s = AnnulusSolution::build(AnnulusParams::from_ladder(900.0, cx(1.0, 0.5), Mode::MeshN).unwrap())
            .unwrap();
        let q = s.sqrt_rho();
        for c in 1..6 {
            let r = 900.0 + c as f64 * q;
            let a = s.ln_envelope(r * (1.0 - 1e-13)).unwrap();
            let b = s.ln_envelope(r).unwrap();
            assert!((a - b).abs() < 1e-6, "c = {c}: {a} vs {b}");
        }
    }
}
