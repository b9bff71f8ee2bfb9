//! A field value given as a short sum of terms, each carried as a log-jet.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::{Cplx, Jet2, LogComplex};

/// Where a point sits inside the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionClass {
    InnerDisk,
    Step1Inner,
    Step1Window,
    Step1Sector,
    Step1Outer,
    Step2,
    Step3,
    Step4Inner,
    Step4Plateau,
    Step4Outer,
}

impl RegionClass {
    pub const ANNULUS: [RegionClass; 9] = [
        RegionClass::Step1Inner,
        RegionClass::Step1Window,
        RegionClass::Step1Sector,
        RegionClass::Step1Outer,
        RegionClass::Step2,
        RegionClass::Step3,
        RegionClass::Step4Inner,
        RegionClass::Step4Plateau,
        RegionClass::Step4Outer,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RegionClass::InnerDisk => "inner_disk",
            RegionClass::Step1Inner => "step1_inner",
            RegionClass::Step1Window => "step1_window",
            RegionClass::Step1Sector => "step1_sector",
            RegionClass::Step1Outer => "step1_outer",
            RegionClass::Step2 => "step2",
            RegionClass::Step3 => "step3",
            RegionClass::Step4Inner => "step4_inner",
            RegionClass::Step4Plateau => "step4_plateau",
            RegionClass::Step4Outer => "step4_outer",
        }
    }
}

/// How the potential is read off at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialRule {
    /// V = (Delta u + lambda u) / u, assembled term by term.
    FromResidual,
    /// W = w (i sin phi, -i cos phi).
    Tangential,
    /// W = w (cos phi, sin phi).
    Radial,
    /// W = w1 e_r + w2 (i sin phi, -i cos phi), one equation per term.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialValue {
    Scalar(Cplx),
    /// Polar coefficients (w1, w2) and Cartesian components (wx, wy).
    Vector { w1: Cplx, w2: Cplx, wx: Cplx, wy: Cplx, fallback: bool },
}

impl PotentialValue {
    pub fn magnitude(&self) -> f64 {
        match self {
            PotentialValue::Scalar(v) => v.norm(),
            PotentialValue::Vector { w1, w2, .. } => (w1.norm_sqr() + w2.norm_sqr()).sqrt(),
        }
    }

    /// P(u) for a linear jet of u: V u or W . grad u.
    pub fn apply(&self, u: Cplx, u_r: Cplx, u_p: Cplx, r: f64) -> Cplx {
        match self {
            PotentialValue::Scalar(v) => v * u,
            PotentialValue::Vector { w1, w2, .. } => w1 * u_r + w2 * Cplx::new(0.0, -1.0) * u_p / r,
        }
    }
}

/// At most two terms in every region of the construction.
#[derive(Debug, Clone, Copy)]
pub struct FieldPoint {
    pub r: f64,
    pub phi: f64,
    pub lambda: Cplx,
    pub class: RegionClass,
    pub rule: PotentialRule,
    terms: [Jet2; 2],
    len: usize,
}

impl FieldPoint {
    pub fn new(r: f64, phi: f64, lambda: Cplx, class: RegionClass, rule: PotentialRule) -> Self {
        Self { r, phi, lambda, class, rule, terms: [Jet2::zero(); 2], len: 0 }
    }

    pub fn push(&mut self, log_term: Jet2) {
        assert!(self.len < 2, "at most two terms per point");
        self.terms[self.len] = log_term;
        self.len += 1;
    }

    pub fn terms(&self) -> &[Jet2] {
        &self.terms[..self.len]
    }

    /// Complex log of the dominant term; used as the common scale.
    pub fn reference(&self) -> Cplx {
        let mut best = self.terms[0].v;
        for t in self.terms() {
            if t.v.re > best.re {
                best = t.v;
            }
        }
        best
    }

    /// Linear jet of u / exp(reference).
    pub fn scaled(&self) -> Jet2 {
        let rf = self.reference();
        let mut u = Jet2::zero();
        for t in self.terms() {
            u = u + t.exp_shifted(rf);
        }
        u
    }

    /// Sum of the term magnitudes divided by exp(Re reference); at least one.
    pub fn envelope_scale(&self) -> f64 {
        let rf = self.reference();
        self.terms().iter().map(|t| (t.v.re - rf.re).exp()).sum()
    }

    pub fn value(&self) -> Result<LogComplex> {
        if self.len == 0 {
            return Err(Error::Eval("no active terms".into()));
        }
        let u = self.scaled();
        if u.v.norm() == 0.0 {
            return Err(Error::Eval(format!("u vanishes at r = {}, phi = {}", self.r, self.phi)));
        }
        let rf = self.reference();
        Ok(LogComplex::exp(rf + u.v.ln()))
    }

    /// Jet of log u (value part matches [`FieldPoint::value`]).
    pub fn log_jet(&self) -> Result<Jet2> {
        let val = self.value()?;
        let u = self.scaled();
        let mut l = u.ln();
        l.v = val.ln();
        Ok(l)
    }

    fn kappa(&self, t: &Jet2) -> Cplx {
        t.helmholtz_quotient(self.r, self.lambda)
    }

    pub fn potential(&self) -> Result<PotentialValue> {
        if self.len == 0 {
            return Err(Error::Eval("no active terms".into()));
        }
        let rf = self.reference();
        let e: Vec<Cplx> = self.terms().iter().map(|t| (t.v - rf).exp()).collect();
        let k: Vec<Cplx> = self.terms().iter().map(|t| self.kappa(t)).collect();
        let minus_i_over_r = Cplx::new(0.0, -1.0 / self.r);
        match self.rule {
            PotentialRule::FromResidual => {
                let u: Cplx = e.iter().sum();
                let iref = (0..self.len).max_by(|&a, &b| e[a].norm().total_cmp(&e[b].norm())).unwrap();
                let mut v = k[iref];
                for i in 0..self.len {
                    if i != iref {
                        if u.norm() == 0.0 {
                            return Err(Error::Eval("potential at an exact zero of u".into()));
                        }
                        v += (k[i] - k[iref]) * e[i] / u;
                    }
                }
                Ok(PotentialValue::Scalar(v))
            }
            PotentialRule::Tangential | PotentialRule::Radial => {
                let tangential = self.rule == PotentialRule::Tangential;
                let mut num = Cplx::new(0.0, 0.0);
                let mut g = Cplx::new(0.0, 0.0);
                let mut scale = 0.0;
                for (i, t) in self.terms().iter().enumerate() {
                    num += k[i] * e[i];
                    g += if tangential { minus_i_over_r * t.p } else { t.r } * e[i];
                    scale += e[i].norm() * (t.r.norm() + t.p.norm() / self.r);
                }
                if g.norm() <= 1e-12 * scale {
                    return Err(Error::SingularSystem(format!(
                        "directional derivative vanishes at r = {}, phi = {}",
                        self.r, self.phi
                    )));
                }
                let w = num / g;
                let zero = Cplx::new(0.0, 0.0);
                Ok(self.vector(if tangential { zero } else { w }, if tangential { w } else { zero }, false))
            }
            PotentialRule::Mixed => {
                if self.len < 2 {
                    let t = &self.terms[0];
                    let g = minus_i_over_r * t.p;
                    if g.norm() <= 1e-12 * (t.r.norm() + t.p.norm() / self.r) {
                        return Err(Error::SingularSystem("single-term mixed system".into()));
                    }
                    return Ok(self.vector(Cplx::new(0.0, 0.0), k[0] / g, false));
                }
                let (a, b) = (&self.terms[0], &self.terms[1]);
                let (a1, a2) = (a.r, minus_i_over_r * a.p);
                let (b1, b2) = (b.r, minus_i_over_r * b.p);
                let det = a1 * b2 - a2 * b1;
                let na = a1.norm() + a2.norm();
                let nb = b1.norm() + b2.norm();
                if det.norm() > 1e-10 * na * nb {
                    let w1 = (k[0] * b2 - a2 * k[1]) / det;
                    let w2 = (a1 * k[1] - k[0] * b1) / det;
                    return Ok(self.vector(w1, w2, false));
                }
                // Least-norm solution of the single equation W . grad u = R.
                let gr = a1 * e[0] + b1 * e[1];
                let gp = a2 * e[0] + b2 * e[1];
                let num = k[0] * e[0] + k[1] * e[1];
                let den = gr.norm_sqr() + gp.norm_sqr();
                if den == 0.0 {
                    return Err(Error::SingularSystem(format!(
                        "degenerate mixed system at r = {}, phi = {}",
                        self.r, self.phi
                    )));
                }
                Ok(self.vector(num * gr.conj() / den, num * gp.conj() / den, true))
            }
        }
    }

    fn vector(&self, w1: Cplx, w2: Cplx, fallback: bool) -> PotentialValue {
        let (s, c) = self.phi.sin_cos();
        let i = Complex::new(0.0, 1.0);
        PotentialValue::Vector { w1, w2, wx: w1 * c + i * w2 * s, wy: w1 * s - i * w2 * c, fallback }
    }
}
