//! One annulus [rho, rho + 6 sqrt(rho)]: glues the mode r^{-n} e^{-i n phi} mu_n
//! at the inner edge to a r^{-(n+k)} e^{-i(n+k) phi} mu_{n+k} at the outer edge.

pub mod closed_forms;
pub mod envelope;
pub mod field;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use field::{FieldPoint, PotentialRule, PotentialValue, RegionClass};

use crate::{AngularProfile, CutoffFamily, MuParams};
use crate::branch::{phi_ab, phi_ab_path_check, turning_point_check};
use crate::error::{Error, Result};
use crate::{Cplx, Jet2, LogComplex};

/// Smallest inner radius accepted by the builder.
pub const RHO_MIN: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "mesh-n")]
    MeshN,
    #[serde(rename = "mesh-p")]
    MeshP,
    #[serde(rename = "mesh-nx")]
    MeshNX,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::MeshN, Mode::MeshP, Mode::MeshNX];

    pub fn name(&self) -> &'static str {
        match self {
            Mode::MeshN => "mesh-n",
            Mode::MeshP => "mesh-p",
            Mode::MeshNX => "mesh-nx",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mesh-n" => Ok(Mode::MeshN),
            "mesh-p" => Ok(Mode::MeshP),
            "mesh-nx" => Ok(Mode::MeshNX),
            _ => Err(Error::Config(format!("unknown mode '{s}'"))),
        }
    }

    /// Vector potential W instead of a scalar V.
    pub fn is_vector(&self) -> bool {
        *self == Mode::MeshP
    }

    /// Whether the step-1 and step-4 terms carry the exp(psi phi_{a,b}) factors.
    pub fn uses_phi_factors(&self) -> bool {
        *self != Mode::MeshP
    }
}

/// max(1, |lambda|).
pub fn big_lambda(lambda: Cplx) -> f64 {
    lambda.norm().max(1.0)
}

/// Index n attached to radius rho by the ladder rule of each mode.
pub fn ladder_index(rho: f64, lambda: Cplx, mode: Mode) -> Result<u64> {
    let v = match mode {
        Mode::MeshN | Mode::MeshP => 2.0 * big_lambda(lambda).sqrt() * rho,
        Mode::MeshNX => {
            if lambda.im != 0.0 || !(lambda.re > 0.0) {
                return Err(Error::Config("mesh-nx needs real lambda > 0".into()));
            }
            lambda.re.sqrt() * (rho + 8.0 * rho.sqrt())
        }
    };
    if !v.is_finite() || v >= 9.0e15 {
        return Err(Error::Index("ladder index overflow".into()));
    }
    Ok(v.floor() as u64)
}

/// Next ladder radius.
pub fn next_rho(rho: f64) -> f64 {
    rho + 6.0 * rho.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnulusParams {
    pub rho: f64,
    pub lambda: Cplx,
    pub mode: Mode,
    pub n: u64,
    pub k: u64,
}

impl AnnulusParams {
    /// Parameters chosen by the ladder rule: n from rho, k = n(next rho) - n.
    pub fn from_ladder(rho: f64, lambda: Cplx, mode: Mode) -> Result<Self> {
        let n = ladder_index(rho, lambda, mode)?;
        let n_next = ladder_index(next_rho(rho), lambda, mode)?;
        let k = n_next
            .checked_sub(n)
            .filter(|&k| k > 0)
            .ok_or_else(|| Error::Index(format!("non-positive k at rho = {rho}")))?;
        Ok(Self { rho, lambda, mode, n, k })
    }

    pub fn sqrt_rho(&self) -> f64 {
        self.rho.sqrt()
    }

    pub fn outer(&self) -> f64 {
        next_rho(self.rho)
    }

    /// Distance of (n, k) from the values the mode prescribes.
    pub fn index_margins(&self) -> (f64, f64) {
        let s = self.sqrt_rho();
        match self.mode {
            Mode::MeshN | Mode::MeshP => {
                let l = big_lambda(self.lambda).sqrt();
                ((self.n as f64 - 2.0 * l * self.rho).abs(), (self.k as f64 - 12.0 * l * s).abs())
            }
            Mode::MeshNX => {
                let l = self.lambda.re.sqrt();
                let nr = |rho: f64| l * (rho + 8.0 * rho.sqrt());
                let kn = nr(self.outer()) - nr(self.rho);
                ((self.n as f64 - nr(self.rho)).abs(), (self.k as f64 - kn).abs())
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rho.is_finite() || self.rho < RHO_MIN {
            return Err(Error::Config(format!("rho = {} below minimum {}", self.rho, RHO_MIN)));
        }
        if !self.lambda.re.is_finite() || !self.lambda.im.is_finite() {
            return Err(Error::Config("lambda must be finite".into()));
        }
        if self.mode == Mode::MeshNX && (self.lambda.im != 0.0 || !(self.lambda.re > 0.0)) {
            return Err(Error::Config("mesh-nx needs real lambda > 0".into()));
        }
        if self.k == 0 || self.n <= 2 * self.k {
            return Err(Error::Index(format!("need k >= 1 and n > 2k (n = {}, k = {})", self.n, self.k)));
        }
        let (dn, dk) = self.index_margins();
        if dn > 1.0 + 1e-9 || dk > 1.0 + 1e-9 {
            return Err(Error::Index(format!(
                "indices off the prescribed values (|dn| = {dn:.3}, |dk| = {dk:.3})"
            )));
        }
        Ok(())
    }
}

/// A contiguous radial piece of the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionPiece {
    pub r_lo: f64,
    pub r_hi: f64,
    pub step: u8,
    /// Sub-class for r; on the step-1 plateau the angular split decides
    /// between window and sector.
    pub class: RegionClass,
    pub angular_split: bool,
    pub rule: PotentialRule,
}

/// The assembled solution on one annulus.
#[derive(Debug, Clone)]
pub struct AnnulusSolution {
    pub params: AnnulusParams,
    pub profile: AngularProfile,
    pub step1: CutoffFamily,
    pub step2: CutoffFamily,
    pub step3: CutoffFamily,
    pub step4: CutoffFamily,
    pub b: LogComplex,
    pub d: LogComplex,
    pub b1: LogComplex,
    pub a: LogComplex,
    pub pieces: Vec<RegionPiece>,
    /// lambda = 0: every mu is identically one.
    pub degenerate_mu: bool,
    pub(crate) mu_n: MuParams,
    pub(crate) mu_lo: MuParams,
    pub(crate) mu_hi: MuParams,
    pub(crate) mu_out: MuParams,
}

fn rule_for(mode: Mode, class: RegionClass) -> PotentialRule {
    if !mode.is_vector() {
        return PotentialRule::FromResidual;
    }
    match class {
        RegionClass::Step2 | RegionClass::Step3 => PotentialRule::Radial,
        RegionClass::Step1Window | RegionClass::Step1Sector | RegionClass::Step4Plateau => PotentialRule::Mixed,
        _ => PotentialRule::Tangential,
    }
}

fn ln_pow(r: f64, e: f64) -> Jet2 {
    Jet2::radial_real(e * r.ln(), e / r, -e / (r * r))
}

/// log e^{i nu phi}.
fn ln_mode(phi: f64, nu: f64) -> Jet2 {
    Jet2::angular(Cplx::new(0.0, nu * phi), Cplx::new(0.0, nu), Cplx::new(0.0, 0.0))
}

impl AnnulusSolution {
    pub fn build(params: AnnulusParams) -> Result<Self> {
        params.validate()?;
        let AnnulusParams { rho, lambda, mode, n, k } = params;
        let s = rho.sqrt();
        let at = |c: f64| rho + c * s;
        turning_point_check(n, lambda, at(0.0), at(2.0))?;
        turning_point_check(n - 2 * k, lambda, at(0.0), at(4.0))?;
        turning_point_check(n + 2 * k, lambda, at(3.0), at(6.0))?;
        turning_point_check(n + k, lambda, at(4.0), at(6.0))?;
        if mode.uses_phi_factors() {
            phi_ab_path_check(n, n - 2 * k, lambda, at(0.0), at(2.0), 256)?;
            phi_ab_path_check(n + k, n + 2 * k, lambda, at(4.0), at(6.0), 256)?;
        }
        let mu_n = MuParams::new(n, lambda)?;
        let mu_lo = MuParams::new(n - 2 * k, lambda)?;
        let mu_hi = MuParams::new(n + 2 * k, lambda)?;
        let mu_out = MuParams::new(n + k, lambda)?;
        let kf = k as f64;

        let r1 = at(1.0);
        let b = LogComplex::real_pow(r1, -2.0 * kf)? * mu_n.value(r1)? / mu_lo.value(r1)?;
        let r3 = at(3.0);
        let d = LogComplex::real_pow(r3, 4.0 * kf)? * mu_lo.value(r3)? / mu_hi.value(r3)?;
        let b1 = b * d;
        let r5 = at(5.0);
        let a = b1 * LogComplex::real_pow(r5, -kf)? * mu_hi.value(r5)? / mu_out.value(r5)?;

        let cuts = [
            (0.0, 2.0 / 3.0, 1, RegionClass::Step1Inner, false),
            (2.0 / 3.0, 4.0 / 3.0, 1, RegionClass::Step1Window, true),
            (4.0 / 3.0, 2.0, 1, RegionClass::Step1Outer, false),
            (2.0, 3.0, 2, RegionClass::Step2, false),
            (3.0, 4.0, 3, RegionClass::Step3, false),
            (4.0, 14.0 / 3.0, 4, RegionClass::Step4Inner, false),
            (14.0 / 3.0, 16.0 / 3.0, 4, RegionClass::Step4Plateau, false),
            (16.0 / 3.0, 6.0, 4, RegionClass::Step4Outer, false),
        ];
        let pieces = cuts
            .iter()
            .map(|&(lo, hi, step, class, split)| RegionPiece {
                r_lo: at(lo),
                r_hi: if hi == 6.0 { next_rho(rho) } else { at(hi) },
                step,
                class,
                angular_split: split,
                rule: rule_for(mode, class),
            })
            .collect();

        Ok(Self {
            params,
            profile: AngularProfile::new(n, k)?,
            step1: CutoffFamily::step1(rho)?,
            step2: CutoffFamily::single(rho, 7.0 / 3.0, 8.0 / 3.0)?,
            step3: CutoffFamily::single(rho, 10.0 / 3.0, 11.0 / 3.0)?,
            step4: CutoffFamily::step4(rho)?,
            b,
            d,
            b1,
            a,
            pieces,
            degenerate_mu: lambda.norm() == 0.0,
            mu_n,
            mu_lo,
            mu_hi,
            mu_out,
        })
    }

    pub fn rho(&self) -> f64 {
        self.params.rho
    }

    pub fn outer(&self) -> f64 {
        self.params.outer()
    }

    pub fn sqrt_rho(&self) -> f64 {
        self.params.sqrt_rho()
    }

    /// Largest angular wavenumber present in any term.
    pub fn max_wavenumber(&self) -> f64 {
        (self.params.n + 7 * self.params.k) as f64
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.rho() && r <= self.outer()
    }

    /// The piece owning r: half-open [lo, hi), the last piece closed.
    pub fn piece(&self, r: f64) -> Result<&RegionPiece> {
        if !self.contains(r) {
            return Err(Error::OutOfDomain(format!(
                "r = {r} outside annulus [{}, {}]",
                self.rho(),
                self.outer()
            )));
        }
        let last = self.pieces.len() - 1;
        Ok(self
            .pieces
            .iter()
            .enumerate()
            .find(|(i, p)| r >= p.r_lo && (r < p.r_hi || *i == last))
            .map(|(_, p)| p)
            .unwrap_or(&self.pieces[last]))
    }

    pub fn class_at(&self, r: f64, phi: f64) -> Result<RegionClass> {
        let p = self.piece(r)?;
        if p.angular_split && !self.profile.in_window(phi) {
            Ok(RegionClass::Step1Sector)
        } else {
            Ok(p.class)
        }
    }

    fn lambda(&self) -> Cplx {
        self.params.lambda
    }

    /// log(psi) jet, or None when psi vanishes.
    fn ln_cut(c: &crate::Cutoff, r: f64) -> Option<Jet2> {
        let j = c.jet(r);
        if j.v.re > 0.0 {
            Some(j.ln())
        } else {
            None
        }
    }

    fn u1(&self, r: f64, phi: f64) -> Result<Jet2> {
        let n = self.params.n as f64;
        Ok(ln_pow(r, -n) + ln_mode(phi, -n) + self.mu_n.ln_jet(r)?)
    }

    /// log of -b r^{-(n-2k)} mu_{n-2k} (the angular factor is added by the caller).
    fn lower_radial(&self, r: f64) -> Result<Jet2> {
        let m = (self.params.n - 2 * self.params.k) as f64;
        Ok(Jet2::constant((-self.b).ln()) + ln_pow(r, -m) + self.mu_lo.ln_jet(r)?)
    }

    fn u4(&self, r: f64, phi: f64) -> Result<Jet2> {
        let m = (self.params.n + 2 * self.params.k) as f64;
        Ok(Jet2::constant((-self.b1).ln()) + ln_pow(r, -m) + ln_mode(phi, m) + self.mu_hi.ln_jet(r)?)
    }

    fn u5(&self, r: f64, phi: f64) -> Result<Jet2> {
        let m = (self.params.n + self.params.k) as f64;
        Ok(Jet2::constant(self.a.ln()) + ln_pow(r, -m) + ln_mode(phi, -m) + self.mu_out.ln_jet(r)?)
    }

    /// Terms at (r, phi) with their log-jets.
    pub fn field_point(&self, r: f64, phi: f64) -> Result<FieldPoint> {
        let piece = *self.piece(r)?;
        let class = self.class_at(r, phi)?;
        let mut fp = FieldPoint::new(r, phi, self.lambda(), class, piece.rule);
        let (n, k) = (self.params.n, self.params.k);
        let with_phi = self.params.mode.uses_phi_factors();
        match piece.step {
            1 => {
                let ph = if with_phi { Some(phi_ab(n, n - 2 * k, self.lambda(), r)?) } else { None };
                let f = &self.step1;
                if let Some(l1) = Self::ln_cut(f.psi(1), r) {
                    let mut t = l1 + self.u1(r, phi)?;
                    if let Some(ph) = ph {
                        t = t + f.psi(4).jet(r) * ph;
                    }
                    fp.push(t);
                }
                if let Some(l2) = Self::ln_cut(f.psi(2), r) {
                    let nu = (n + 2 * k) as f64;
                    let ang = ln_mode(phi, nu) + self.profile.phase_jet(phi).scale(Cplx::new(0.0, 1.0));
                    let mut t = l2 + self.lower_radial(r)? + ang;
                    if let Some(ph) = ph {
                        t = t + f.psi(3).jet(r) * ph;
                    }
                    fp.push(t);
                }
            }
            2 => {
                let nu = (n + 2 * k) as f64;
                let psi_phase = self.step2.psi(1).jet(r) * self.profile.phase_jet(phi);
                fp.push(self.lower_radial(r)? + ln_mode(phi, nu) + psi_phase.scale(Cplx::new(0.0, 1.0)));
            }
            3 => {
                let nu = (n + 2 * k) as f64;
                let base = self.lower_radial(r)? + ln_mode(phi, nu);
                fp.push(base + self.ln_h(r)?);
            }
            _ => {
                let ph = if with_phi { Some(phi_ab(n + k, n + 2 * k, self.lambda(), r)?) } else { None };
                let f = &self.step4;
                if let Some(l1) = Self::ln_cut(f.psi(1), r) {
                    let mut t = l1 + self.u4(r, phi)?;
                    if let Some(ph) = ph {
                        t = t + f.psi(4).jet(r) * ph;
                    }
                    fp.push(t);
                }
                if let Some(l2) = Self::ln_cut(f.psi(2), r) {
                    let mut t = l2 + self.u5(r, phi)?;
                    if let Some(ph) = ph {
                        t = t + f.psi(3).jet(r) * ph;
                    }
                    fp.push(t);
                }
            }
        }
        Ok(fp)
    }

    /// log g, g = d r^{-4k} mu_{n+2k} / mu_{n-2k}.
    pub fn ln_g(&self, r: f64) -> Result<Jet2> {
        let k = self.params.k as f64;
        Ok(Jet2::constant(self.d.ln()) + ln_pow(r, -4.0 * k) + self.mu_hi.ln_jet(r)? - self.mu_lo.ln_jet(r)?)
    }

    /// log h, h = psi + (1 - psi) g on step 3.
    pub fn ln_h(&self, r: f64) -> Result<Jet2> {
        let psi = self.step3.psi(1).jet(r);
        let lg = self.ln_g(r)?;
        if psi.v.re == 0.0 {
            return Ok(lg);
        }
        let one = Jet2::constant(Cplx::new(1.0, 0.0));
        let h = psi + (one - psi) * lg.exp();
        if h.v.norm() == 0.0 {
            return Err(Error::Eval(format!("h vanishes at r = {r}")));
        }
        Ok(h.ln())
    }

    pub fn eval_u(&self, r: f64, phi: f64) -> Result<(LogComplex, Jet2)> {
        let fp = self.field_point(r, phi)?;
        Ok((fp.value()?, fp.log_jet()?))
    }

    pub fn eval_potential(&self, r: f64, phi: f64) -> Result<PotentialValue> {
        self.field_point(r, phi)?.potential()
    }

    /// r^{-n} e^{-i n phi} mu_n, the state at the inner edge.
    pub fn inner_state(&self, r: f64, phi: f64) -> Result<LogComplex> {
        Ok(LogComplex::exp(self.u1(r, phi)?.v))
    }

    /// a r^{-(n+k)} e^{-i(n+k) phi} mu_{n+k}, the state at the outer edge.
    pub fn outer_state(&self, r: f64, phi: f64) -> Result<LogComplex> {
        Ok(LogComplex::exp(self.u5(r, phi)?.v))
    }

    /// z(r) with u1 + u2 = 0 exactly when e^{iS} = z on the step-1 plateau.
    pub fn zero_locus(&self, r: f64) -> Result<LogComplex> {
        let k = self.params.k as f64;
        Ok(LogComplex::real_pow(r, -2.0 * k)? * self.mu_n.value(r)? / (self.b * self.mu_lo.value(r)?))
    }

    /// Radii where some ingredient is only finitely smooth: piece boundaries
    /// and cutoff ramp endpoints, sorted.
    pub fn radial_breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pieces.iter().flat_map(|p| [p.r_lo, p.r_hi]).collect();
        for f in [&self.step1, &self.step2, &self.step3, &self.step4] {
            b.extend(f.breakpoints());
        }
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// The four mu families used on this annulus, keyed by index.
    pub fn mu(&self, index: u64) -> Result<MuParams> {
        [self.mu_n, self.mu_lo, self.mu_hi, self.mu_out]
            .into_iter()
            .find(|m| m.n == index)
            .ok_or_else(|| Error::Index(format!("index {index} not used on this annulus")))
    }
}

/// Shorthand used in tests and the verifier.
pub fn cx(re: f64, im: f64) -> Cplx {
    Complex::new(re, im)
}
