//! Closed-form potential coefficients for individual regions, written out
//! independently of the term-by-term assembly so the two can be compared.

use super::AnnulusSolution;
use crate::branch::{phi_ab, radical};
use crate::error::Result;
use crate::Cplx;

impl AnnulusSolution {
    fn qi(&self, index: u64, r: f64) -> Result<Cplx> {
        radical(index, self.params.lambda, r)
    }

    /// -sqrt((n - a k)^2 - lambda r^2) / r.
    pub fn cf_j1(&self, a: i64, r: f64) -> Result<Cplx> {
        Ok(-self.qi(self.shift(-a), r)? / r)
    }

    /// (n + a k) / r.
    pub fn cf_j2(&self, a: i64, r: f64) -> f64 {
        self.shift(a) as f64 / r
    }

    /// lambda / sqrt((n - a k)^2 - lambda r^2).
    pub fn cf_big_j1(&self, a: i64, r: f64) -> Result<Cplx> {
        Ok(self.params.lambda / self.qi(self.shift(-a), r)?)
    }

    fn shift(&self, a: i64) -> u64 {
        (self.params.n as i64 + a * self.params.k as i64) as u64
    }

    /// -(8nk + 2(n+2k) Phi' + Phi'^2 - i Phi'') / r^2.
    pub fn cf_k1(&self, r: f64, phi: f64) -> Cplx {
        let (n, k) = (self.params.n as f64, self.params.k as f64);
        let f = self.profile.f(phi);
        let fp = self.profile.f_prime(phi);
        -(Cplx::new(8.0 * n * k + 2.0 * (n + 2.0 * k) * f + f * f, -fp)) / (r * r)
    }

    /// lambda/q_a + lambda/q_b + phi'/r + phi'^2 + phi'' for phi = phi_{a,b}.
    fn cf_window(&self, ia: u64, ib: u64, r: f64) -> Result<Cplx> {
        let l = self.params.lambda;
        let ph = phi_ab(ia, ib, l, r)?;
        Ok(l / self.qi(ia, r)? + l / self.qi(ib, r)? + ph.r / r + ph.r * ph.r + ph.rr)
    }

    /// Potential in the step-1 windows (psi_3 = psi_4 = 1).
    pub fn cf_v_window(&self, r: f64) -> Result<Cplx> {
        let (n, k) = (self.params.n, self.params.k);
        self.cf_window(n, n - 2 * k, r)
    }

    /// Potential on the step-4 plateau.
    pub fn cf_v_step4_plateau(&self, r: f64) -> Result<Cplx> {
        let (n, k) = (self.params.n, self.params.k);
        self.cf_window(n + k, n + 2 * k, r)
    }

    /// Potential in the step-1 sectors: window value plus K_1 u2 / (u1 + u2).
    pub fn cf_v_sector(&self, r: f64, phi: f64) -> Result<Cplx> {
        let fp = self.field_point(r, phi)?;
        let t = fp.terms();
        let rf = fp.reference();
        let e1 = (t[0].v - rf).exp();
        let e2 = (t[1].v - rf).exp();
        Ok(self.cf_v_window(r)? + self.cf_k1(r, phi) * e2 / (e1 + e2))
    }

    /// Step-2 potential.
    pub fn cf_d2(&self, r: f64, phi: f64) -> Result<Cplx> {
        let (n, k) = (self.params.n as f64, self.params.k as f64);
        let l = self.params.lambda;
        let q = self.qi(self.params.n - 2 * self.params.k, r)?;
        let (psi, dpsi, ddpsi) = self.step2.psi(1).eval(r);
        let big = self.profile.phase(phi);
        let f = self.profile.f(phi);
        let fp = self.profile.f_prime(phi);
        let i = Cplx::new(0.0, 1.0);
        let r2 = r * r;
        Ok(Cplx::new(-8.0 * n * k / r2 - (dpsi * big).powi(2), 0.0)
            + i * big * (dpsi / r + ddpsi)
            - 2.0 * (n + 2.0 * k) * psi * f / r2
            - (psi * f).powi(2) / r2
            + i * psi * fp / r2
            + l / q
            - 2.0 * i * dpsi * big * q / r)
    }

    /// Radial log-derivative of u on step 2 (the coefficient d_2).
    pub fn cf_small_d2(&self, r: f64, phi: f64) -> Result<Cplx> {
        let q = self.qi(self.params.n - 2 * self.params.k, r)?;
        let (_, dpsi, _) = self.step2.psi(1).eval(r);
        Ok(-q / r + Cplx::new(0.0, dpsi * self.profile.phase(phi)))
    }

    /// Step-3 potential: -8nk/r^2 + lambda/q - 2 (q/r) h'/h + Delta h / h.
    pub fn cf_d3(&self, r: f64) -> Result<Cplx> {
        let (n, k) = (self.params.n as f64, self.params.k as f64);
        let q = self.qi(self.params.n - 2 * self.params.k, r)?;
        let lh = self.ln_h(r)?;
        let hp = lh.r;
        let lap = lh.rr + lh.r * lh.r + lh.r / r;
        Ok(Cplx::new(-8.0 * n * k / (r * r), 0.0) + self.params.lambda / q - 2.0 * q / r * hp + lap)
    }

    pub fn cf_small_d3(&self, r: f64) -> Result<Cplx> {
        let q = self.qi(self.params.n - 2 * self.params.k, r)?;
        Ok(-q / r + self.ln_h(r)?.r)
    }

    /// (w1, w2) on the step-1 plateau of the vector construction, from the
    /// 2x2 system solved by Cramer's rule.
    pub fn cf_w_step1_plateau(&self, r: f64, phi: f64) -> Result<(Cplx, Cplx)> {
        let j10 = self.cf_j1(0, r)?;
        let j12 = self.cf_j1(2, r)?;
        let j20 = self.cf_j2(0, r);
        let j22 = self.cf_j2(2, r) + self.profile.f(phi) / r;
        let big0 = self.cf_big_j1(0, r)?;
        let big2 = self.cf_big_j1(2, r)? + self.cf_k1(r, phi);
        let den = j10 * j22 + j20 * j12;
        let w1 = (big0 * j22 + j20 * big2) / den;
        let w2 = (j10 * big2 - j12 * big0) / den;
        Ok((w1, w2))
    }

    /// (w1, w2) on the step-4 plateau of the vector construction.
    pub fn cf_w_step4_plateau(&self, r: f64) -> Result<(Cplx, Cplx)> {
        let (a, b) = (self.cf_j1(-2, r)?, self.cf_j1(-1, r)?);
        let (c2, c1) = (self.cf_j2(2, r), self.cf_j2(1, r));
        let (big2, big1) = (self.cf_big_j1(-2, r)?, self.cf_big_j1(-1, r)?);
        let den = a * c1 + c2 * b;
        Ok(((c1 * big2 + c2 * big1) / den, (b * big2 - a * big1) / den))
    }
}

#[cfg(test)]
mod tests {
    use crate::annulus::{cx, AnnulusParams, AnnulusSolution, Mode, PotentialValue, RegionClass};

    fn rel(a: crate::Cplx, b: crate::Cplx) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn scalar_closed_forms_agree() {
        for lam in [cx(1.0, 0.0), cx(1.0, 0.5)] {
            let s = AnnulusSolution::build(AnnulusParams::from_ladder(900.0, lam, Mode::MeshN).unwrap()).unwrap();
            let q = s.sqrt_rho();
            let t = s.profile.period;
            for &(c, phi) in &[(2.2, 0.31), (2.5, 0.4 * t), (2.9, 1.0)] {
                let r = 900.0 + c * q;
                let PotentialValue::Scalar(v) = s.eval_potential(r, phi).unwrap() else { unreachable!() };
                assert!(rel(v, s.cf_d2(r, phi).unwrap()) < 1e-8, "step2 c={c}");
            }
            for &c in &[3.1, 3.5, 3.9] {
                let r = 900.0 + c * q;
                let PotentialValue::Scalar(v) = s.eval_potential(r, 0.2).unwrap() else { unreachable!() };
                assert!(rel(v, s.cf_d3(r).unwrap()) < 1e-8, "step3 c={c}");
            }
            let r = 900.0 + 1.1 * q;
            let phi = 17.0 * t + 0.05 * t;
            assert_eq!(s.class_at(r, phi).unwrap(), RegionClass::Step1Window);
            let PotentialValue::Scalar(v) = s.eval_potential(r, phi).unwrap() else { unreachable!() };
            assert!(rel(v, s.cf_v_window(r).unwrap()) < 1e-8);
            let phi = 17.0 * t + 0.5 * t;
            let PotentialValue::Scalar(v) = s.eval_potential(r, phi).unwrap() else { unreachable!() };
            assert!(rel(v, s.cf_v_sector(r, phi).unwrap()) < 1e-8);
            let r = 900.0 + 5.1 * q;
            let PotentialValue::Scalar(v) = s.eval_potential(r, 0.7).unwrap() else { unreachable!() };
            assert!(rel(v, s.cf_v_step4_plateau(r).unwrap()) < 1e-8);
        }
    }

    #[test]
    fn vector_closed_forms_agree() {
        let s = AnnulusSolution::build(AnnulusParams::from_ladder(900.0, cx(1.0, 0.0), Mode::MeshP).unwrap()).unwrap();
        let q = s.sqrt_rho();
        let t = s.profile.period;
        let r = 900.0 + 2.5 * q;
        let phi = 3.0 * t + 0.45 * t;
        let PotentialValue::Vector { w1, w2, .. } = s.eval_potential(r, phi).unwrap() else { unreachable!() };
        assert!(w2.norm() == 0.0);
        let e = s.cf_d2(r, phi).unwrap() / s.cf_small_d2(r, phi).unwrap();
        assert!(rel(w1, e) < 1e-8);
        let r = 900.0 + 3.5 * q;
        let PotentialValue::Vector { w1, .. } = s.eval_potential(r, phi).unwrap() else { unreachable!() };
        assert!(rel(w1, s.cf_d3(r).unwrap() / s.cf_small_d3(r).unwrap()) < 1e-8);
        for phi in [3.0 * t + 0.1 * t, 3.0 * t + 0.5 * t] {
            let r = 900.0 + 1.2 * q;
            let PotentialValue::Vector { w1, w2, fallback, .. } = s.eval_potential(r, phi).unwrap() else {
                unreachable!()
            };
            assert!(!fallback);
            let (e1, e2) = s.cf_w_step1_plateau(r, phi).unwrap();
            assert!(rel(w1, e1) < 1e-8);
            assert!(rel(w2, e2) < 1e-8);
        }
        let r = 900.0 + 4.9 * q;
        let PotentialValue::Vector { w1, w2, .. } = s.eval_potential(r, 0.3).unwrap() else { unreachable!() };
        let (e1, e2) = s.cf_w_step4_plateau(r).unwrap();
        assert!(rel(w1, e1) < 1e-8);
        assert!(rel(w2, e2) < 1e-8);
    }
}
