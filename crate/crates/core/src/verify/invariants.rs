//! Module-level invariants of the construction, measured on dense grids.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::annulus::{AnnulusSolution, Mode};
use crate::branch::phi_ab;
use crate::error::Result;
use crate::plane::PlaneSolution;
use crate::Cplx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
    #[serde(rename = "finite")]
    Finite,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
            Relation::Above => ">",
            Relation::Finite => "finite",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: Option<f64>,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, bound: Some(bound), relation: Relation::AtMost, pass: measured <= bound }
    }

    pub fn at_least(name: &str, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, bound: Some(bound), relation: Relation::AtLeast, pass: measured >= bound }
    }

    pub fn below(name: &str, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, bound: Some(bound), relation: Relation::Below, pass: measured < bound }
    }

    pub fn above(name: &str, measured: f64, bound: f64) -> Self {
        Self { name: name.into(), measured, bound: Some(bound), relation: Relation::Above, pass: measured > bound }
    }

    pub fn finite(name: &str, measured: f64) -> Self {
        Self { name: name.into(), measured, bound: None, relation: Relation::Finite, pass: measured.is_finite() }
    }
}

/// Pinned bounds.
pub const F3_BOUND: f64 = 30.0;
pub const PSI_BOUND: f64 = 40.0;
/// Half of sin(pi/7), rounded down.
pub const SECTOR_GAP: f64 = 0.21694;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (m, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    rule.0.iter().zip(&rule.1).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
}

/// Worst values over all annuli; one field per measured quantity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AnnulusInvariants {
    pub f_min_over_k: f64,
    pub f_max_over_k: f64,
    pub f_integral_rel: f64,
    pub f3_constant: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3_constant: f64,
    pub phi4_defect: f64,
    pub periodicity_defect: f64,
    pub s_prime_minus_n: f64,
    pub sbd_margin: f64,
    pub sector_gap: f64,
    pub sum_psi_max: f64,
    pub psi_c1: f64,
    pub psi_c2: f64,
    pub psib_c0: f64,
    pub psib_c1: f64,
    pub psib_c2: f64,
    pub h_c_tilde: f64,
    pub h_prime_sqrt_r: f64,
    pub h_laplacian_r: f64,
    pub sep_u2u1_inner: f64,
    pub sep_u2u1_outer: f64,
    pub sep_u5u4_inner: f64,
    pub sep_u5u4_outer: f64,
    /// Lower bounds of |u| against the dominant piece, as ratios to the
    /// bound; each must be >= 1.
    pub lower_1a: f64,
    pub lower_1b: f64,
    pub lower_4a: f64,
    pub lower_4b: f64,
    pub nx_radical: f64,
}

const PROFILE_GRID: usize = 20_000;
const RADIAL_GRID: usize = 512;
const PHASE_GRID: usize = 128;
const SECTOR_RADII: usize = 64;

fn profile_part(a: &AnnulusSolution, out: &mut AnnulusInvariants) {
    let p = &a.profile;
    let (n, k) = (a.params.n as f64, a.params.k as f64);
    let t = p.period;
    let (mut fmin, mut fmax, mut fp, mut phi1, mut phi2, mut phi4) = (f64::MAX, f64::MIN, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut smin = f64::MAX;
    for i in 0..PROFILE_GRID {
        let x = t * (i as f64 + 0.5) / PROFILE_GRID as f64;
        let f = p.f(x);
        fmin = fmin.min(f);
        fmax = fmax.max(f);
        fp = fp.max(p.f_prime(x).abs());
        phi1 = phi1.max(p.phase(x).abs());
        phi2 = phi2.max(f.abs());
        smin = smin.min(p.s_jet(x).p.re);
        // windows: |x - phi_m| <= T/5 with phi_m = 0 or T
        let off = if x <= 0.2 * t { x } else if x >= 0.8 * t { x - t } else { f64::NAN };
        if off.is_finite() {
            phi4 = phi4.max((p.phase(x) + 4.0 * k * off).abs());
        }
    }
    let rule = gauss_legendre(16);
    let mut cuts = vec![0.0];
    cuts.extend(p.kinks());
    cuts.push(t);
    let integral: f64 = cuts.windows(2).map(|w| integrate(|x| p.f(x), w[0], w[1], &rule)).sum();
    let mut period = 0.0f64;
    for i in 0..16 {
        let x = t * (i as f64 + 0.37);
        period = period.max((p.phase(x + TAU) - p.phase(x)).abs());
    }
    // S on a sector [T/5, 4T/5]; e^{iS} is T-periodic with S(mT) = 2 pi m, so
    // one period covers every P_m.
    let mut sbd = f64::MAX;
    let mut ephases = Vec::with_capacity(PROFILE_GRID / 4);
    for i in 0..=PROFILE_GRID / 4 {
        let x = t * (0.2 + 0.6 * i as f64 / (PROFILE_GRID / 4) as f64);
        let s = p.s_jet(x).v.re;
        let d = s - (s / TAU).round() * TAU;
        sbd = sbd.min(d.abs() - PI / 7.0);
        ephases.push(s);
    }
    let mut gap = f64::MAX;
    let s = a.sqrt_rho();
    for i in 0..SECTOR_RADII {
        let r = a.rho() + s * (2.0 / 3.0 + (2.0 / 3.0) * i as f64 / (SECTOR_RADII - 1) as f64);
        if let Ok(z) = a.zero_locus(r) {
            let z = z.to_complex();
            for &ph in &ephases {
                gap = gap.min((Cplx::from_polar(1.0, ph) - z).norm());
            }
        }
    }
    let kt = k * t;
    *out = AnnulusInvariants {
        f_min_over_k: out.f_min_over_k.min(fmin / k),
        f_max_over_k: out.f_max_over_k.max(fmax / k),
        f_integral_rel: out.f_integral_rel.max(integral.abs() / kt),
        f3_constant: out.f3_constant.max(fp * t / k),
        phi1: out.phi1.max(phi1 / kt),
        phi2: out.phi2.max(phi2 / k),
        phi3_constant: out.phi3_constant.max(fp / (k * (n + k) / PI)),
        phi4_defect: out.phi4_defect.max(phi4 / kt),
        periodicity_defect: out.periodicity_defect.max(period / kt),
        s_prime_minus_n: out.s_prime_minus_n.min(smin - n),
        sbd_margin: out.sbd_margin.min(sbd),
        sector_gap: out.sector_gap.min(gap),
        ..*out
    };
}

fn sup_derivative(c: &crate::Cutoff, lo: f64, hi: f64) -> (f64, f64, f64) {
    let (mut c0, mut c1, mut c2) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..=4 * RADIAL_GRID {
        let r = lo + (hi - lo) * i as f64 / (4 * RADIAL_GRID) as f64;
        let (v, d, dd) = c.eval(r);
        c0 = c0.max(v.abs());
        c1 = c1.max(d.abs() * r.sqrt());
        c2 = c2.max(dd.abs() * r);
    }
    (c0, c1, c2)
}

fn cutoff_part(a: &AnnulusSolution, out: &mut AnnulusInvariants) {
    let s = a.sqrt_rho();
    let (lo, hi) = (a.rho(), a.outer());
    for fam in [&a.step1, &a.step4] {
        for m in &fam.members {
            let (_, c1, c2) = sup_derivative(m, lo, hi);
            out.psi_c1 = out.psi_c1.max(c1);
            out.psi_c2 = out.psi_c2.max(c2);
        }
        for i in 0..=4 * RADIAL_GRID {
            let r = lo + (hi - lo) * i as f64 / (4 * RADIAL_GRID) as f64;
            out.sum_psi_max = out.sum_psi_max.max(fam.psi(1).value(r) + fam.psi(2).value(r));
        }
    }
    for fam in [&a.step2, &a.step3] {
        let (c0, c1, c2) = sup_derivative(fam.psi(1), lo + 2.0 * s, lo + 4.0 * s);
        out.psib_c0 = out.psib_c0.max(c0);
        out.psib_c1 = out.psib_c1.max(c1);
        out.psib_c2 = out.psib_c2.max(c2);
    }
}

fn h_part(a: &AnnulusSolution, out: &mut AnnulusInvariants) -> Result<()> {
    let s = a.sqrt_rho();
    for i in 0..=RADIAL_GRID {
        let r = a.rho() + s * (3.0 + i as f64 / RADIAL_GRID as f64);
        let lh = a.ln_h(r)?;
        let h = lh.exp();
        out.h_c_tilde = out.h_c_tilde.max(-lh.v.re);
        out.h_prime_sqrt_r = out.h_prime_sqrt_r.max(h.r.norm() * r.sqrt());
        out.h_laplacian_r = out.h_laplacian_r.max((h.rr + h.r / r).norm() * r);
    }
    Ok(())
}

/// ln|u_i| on the radial profile, without angular factors or cutoffs.
fn ln_u(a: &AnnulusSolution, which: u8, r: f64) -> Result<f64> {
    let (n, k) = (a.params.n, a.params.k);
    let lr = r.ln();
    Ok(match which {
        1 => a.inner_state(r, 0.0)?.logmod,
        2 => a.b.logmod - (n - 2 * k) as f64 * lr + a.mu(n - 2 * k)?.ln_value(r)?.re,
        4 => a.b1.logmod - (n + 2 * k) as f64 * lr + a.mu(n + 2 * k)?.ln_value(r)?.re,
        _ => a.outer_state(r, 0.0)?.logmod,
    })
}

fn radii(a: &AnnulusSolution, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let s = a.sqrt_rho();
    (0..=count).map(|i| a.rho() + s * (lo + (hi - lo) * i as f64 / count as f64)).collect()
}

/// min over r in [lo, hi] sqrt(rho) and one relative-phase period of
/// ln|u| - psi Re phi - ln|dominant|.
fn lower_bound(
    a: &AnnulusSolution,
    lo: f64,
    hi: f64,
    period: f64,
    weight: impl Fn(f64) -> Result<f64>,
    dominant: u8,
) -> Result<f64> {
    let mut best = f64::MAX;
    for r in radii(a, lo, hi, 16) {
        let base = ln_u(a, dominant, r)?;
        let w = weight(r)?;
        for q in 0..PHASE_GRID {
            let phi = period * (q as f64 + 0.5) / PHASE_GRID as f64;
            let u = a.field_point(r, phi)?.value()?.logmod;
            best = best.min(u - w - base);
        }
    }
    Ok(best)
}

fn separation_part(a: &AnnulusSolution, out: &mut AnnulusInvariants) -> Result<()> {
    let outer_hi = (a.outer() - a.rho()) / a.sqrt_rho();
    let gap = |lo: f64, hi: f64, big: u8, small: u8| -> Result<f64> {
        let mut m = f64::MAX;
        for r in radii(a, lo, hi, RADIAL_GRID) {
            m = m.min(ln_u(a, big, r)? - ln_u(a, small, r)?);
        }
        Ok(m)
    };
    let c = [
        gap(0.0, 2.0 / 3.0, 1, 2)?,
        gap(4.0 / 3.0, 2.0, 2, 1)?,
        gap(4.0, 14.0 / 3.0, 4, 5)?,
        gap(16.0 / 3.0, outer_hi, 5, 4)?,
    ];
    let (n, k) = (a.params.n, a.params.k);
    let lam = a.params.lambda;
    let with_phi = a.params.mode.uses_phi_factors();
    let phi1 = |psi: usize| {
        move |r: f64| -> Result<f64> {
            Ok(if with_phi { a.step1.psi(psi).value(r) * phi_ab(n, n - 2 * k, lam, r)?.v.re } else { 0.0 })
        }
    };
    let phi4 = |psi: usize| {
        move |r: f64| -> Result<f64> {
            Ok(if with_phi { a.step4.psi(psi).value(r) * phi_ab(n + k, n + 2 * k, lam, r)?.v.re } else { 0.0 })
        }
    };
    let t1 = a.profile.period;
    let t4 = TAU / (2 * n + 3 * k) as f64;
    let half = |cst: f64| (0.5 * (1.0 - (-cst).exp())).ln();
    let l1a = lower_bound(a, 0.0, 2.0 / 3.0, t1, phi1(4), 1)? - half(c[0]);
    let l1b = lower_bound(a, 4.0 / 3.0, 2.0, t1, phi1(3), 2)? - half(c[1]);
    let l4a = lower_bound(a, 4.0, 14.0 / 3.0, t4, phi4(4), 4)? - half(c[2]);
    let l4b = lower_bound(a, 16.0 / 3.0, outer_hi, t4, phi4(3), 5)? - half(c[3]);
    out.sep_u2u1_inner = out.sep_u2u1_inner.min(c[0]);
    out.sep_u2u1_outer = out.sep_u2u1_outer.min(c[1]);
    out.sep_u5u4_inner = out.sep_u5u4_inner.min(c[2]);
    out.sep_u5u4_outer = out.sep_u5u4_outer.min(c[3]);
    out.lower_1a = out.lower_1a.min(l1a.exp());
    out.lower_1b = out.lower_1b.min(l1b.exp());
    out.lower_4a = out.lower_4a.min(l4a.exp());
    out.lower_4b = out.lower_4b.min(l4b.exp());
    Ok(())
}

fn nx_part(a: &AnnulusSolution, out: &mut AnnulusInvariants) {
    let (n, k) = (a.params.n as f64, a.params.k as f64);
    let lam = a.params.lambda;
    let hi = (a.outer() - a.rho()) / a.sqrt_rho();
    for r in radii(a, 0.0, hi, 64) {
        for m in -2..=2 {
            let q = (n + m as f64 * k).powi(2) - lam * r * r;
            out.nx_radical = out.nx_radical.max(q.norm().sqrt() * r.powf(-0.75));
        }
    }
}

fn annulus_invariants(a: &AnnulusSolution) -> Result<AnnulusInvariants> {
    let mut out = AnnulusInvariants {
        f_min_over_k: f64::MAX,
        f_max_over_k: f64::MIN,
        s_prime_minus_n: f64::MAX,
        sbd_margin: f64::MAX,
        sector_gap: f64::MAX,
        sep_u2u1_inner: f64::MAX,
        sep_u2u1_outer: f64::MAX,
        sep_u5u4_inner: f64::MAX,
        sep_u5u4_outer: f64::MAX,
        lower_1a: f64::MAX,
        lower_1b: f64::MAX,
        lower_4a: f64::MAX,
        lower_4b: f64::MAX,
        ..Default::default()
    };
    profile_part(a, &mut out);
    cutoff_part(a, &mut out);
    h_part(a, &mut out)?;
    separation_part(a, &mut out)?;
    nx_part(a, &mut out);
    Ok(out)
}

fn merge(x: AnnulusInvariants, y: &AnnulusInvariants) -> AnnulusInvariants {
    AnnulusInvariants {
        f_min_over_k: x.f_min_over_k.min(y.f_min_over_k),
        f_max_over_k: x.f_max_over_k.max(y.f_max_over_k),
        f_integral_rel: x.f_integral_rel.max(y.f_integral_rel),
        f3_constant: x.f3_constant.max(y.f3_constant),
        phi1: x.phi1.max(y.phi1),
        phi2: x.phi2.max(y.phi2),
        phi3_constant: x.phi3_constant.max(y.phi3_constant),
        phi4_defect: x.phi4_defect.max(y.phi4_defect),
        periodicity_defect: x.periodicity_defect.max(y.periodicity_defect),
        s_prime_minus_n: x.s_prime_minus_n.min(y.s_prime_minus_n),
        sbd_margin: x.sbd_margin.min(y.sbd_margin),
        sector_gap: x.sector_gap.min(y.sector_gap),
        sum_psi_max: x.sum_psi_max.max(y.sum_psi_max),
        psi_c1: x.psi_c1.max(y.psi_c1),
        psi_c2: x.psi_c2.max(y.psi_c2),
        psib_c0: x.psib_c0.max(y.psib_c0),
        psib_c1: x.psib_c1.max(y.psib_c1),
        psib_c2: x.psib_c2.max(y.psib_c2),
        h_c_tilde: x.h_c_tilde.max(y.h_c_tilde),
        h_prime_sqrt_r: x.h_prime_sqrt_r.max(y.h_prime_sqrt_r),
        h_laplacian_r: x.h_laplacian_r.max(y.h_laplacian_r),
        sep_u2u1_inner: x.sep_u2u1_inner.min(y.sep_u2u1_inner),
        sep_u2u1_outer: x.sep_u2u1_outer.min(y.sep_u2u1_outer),
        sep_u5u4_inner: x.sep_u5u4_inner.min(y.sep_u5u4_inner),
        sep_u5u4_outer: x.sep_u5u4_outer.min(y.sep_u5u4_outer),
        lower_1a: x.lower_1a.min(y.lower_1a),
        lower_1b: x.lower_1b.min(y.lower_1b),
        lower_4a: x.lower_4a.min(y.lower_4a),
        lower_4b: x.lower_4b.min(y.lower_4b),
        nx_radical: x.nx_radical.max(y.nx_radical),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub values: AnnulusInvariants,
    pub checks: Vec<Check>,
    pub eval_errors: Vec<String>,
}

/// Runs every invariant on every annulus and keeps the worst values.
pub fn invariant_sweep(plane: &PlaneSolution) -> InvariantReport {
    let per: Vec<Result<AnnulusInvariants>> = plane.annuli.par_iter().map(annulus_invariants).collect();
    let mut eval_errors = Vec::new();
    let mut ok = Vec::new();
    for (j, p) in per.into_iter().enumerate() {
        match p {
            Ok(v) => ok.push(v),
            Err(e) => eval_errors.push(format!("annulus {}: {e}", j + 1)),
        }
    }
    let v = match ok.split_first() {
        Some((first, rest)) => rest.iter().fold(*first, merge),
        None => AnnulusInvariants::default(),
    };
    let eps = 4.0 * f64::EPSILON;
    let mut checks = vec![
        Check::at_least("f1_lower", v.f_min_over_k, -4.0 - 1e-12),
        Check::at_most("f1_upper", v.f_max_over_k, 5.0 + 1e-12),
        Check::at_most("f2_zero_mean", v.f_integral_rel, 1e-12),
        Check::at_most("f3_slope", v.f3_constant, F3_BOUND),
        Check::at_most("phi1", v.phi1, 5.0 + 1e-12),
        Check::at_most("phi2", v.phi2, 5.0 + 1e-12),
        Check::at_most("phi3", v.phi3_constant, F3_BOUND),
        Check::at_most("phi4_linear_in_windows", v.phi4_defect, 1e-9),
        Check::at_most("phi_2pi_periodic", v.periodicity_defect, 1e-9),
        Check::above("s_prime_above_n", v.s_prime_minus_n, 0.0),
        Check::at_least("sbd_margin", v.sbd_margin, 0.0),
        Check::at_least("sector_gap", v.sector_gap, SECTOR_GAP),
        Check::at_most("sum_bd_max", (v.sum_psi_max - 1.0).abs(), eps),
        Check::at_most("psi_c1", v.psi_c1, PSI_BOUND),
        Check::at_most("psi_c2", v.psi_c2, PSI_BOUND),
        Check::at_most("psib_c0", v.psib_c0, PSI_BOUND),
        Check::at_most("psib_c1", v.psib_c1, PSI_BOUND),
        Check::at_most("psib_c2", v.psib_c2, PSI_BOUND),
        Check::finite("h_c_tilde", v.h_c_tilde),
        Check::finite("h_prime_sqrt_r", v.h_prime_sqrt_r),
        Check::finite("h_laplacian_r", v.h_laplacian_r),
        Check::above("sep_u2u1_inner", v.sep_u2u1_inner, 0.0),
        Check::above("sep_u2u1_outer", v.sep_u2u1_outer, 0.0),
        Check::above("sep_u5u4_inner", v.sep_u5u4_inner, 0.0),
        Check::above("sep_u5u4_outer", v.sep_u5u4_outer, 0.0),
        // attained with equality where psi1 = psi2 = 1/2 and the terms are antiphase
        Check::at_least("lower_step1_inner", v.lower_1a, 1.0 - 1e-9),
        Check::at_least("lower_step1_outer", v.lower_1b, 1.0 - 1e-9),
        Check::at_least("lower_step4_inner", v.lower_4a, 1.0 - 1e-9),
        Check::at_least("lower_step4_outer", v.lower_4b, 1.0 - 1e-9),
    ];
    if plane.config.mode == Mode::MeshNX {
        checks.push(Check::finite("nx_radical", v.nx_radical));
    }
    InvariantReport { values: v, checks, eval_errors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let rule = gauss_legendre(8);
        assert!((rule.1.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let v = integrate(|x| x.powi(14), 0.0, 1.0, &rule);
        assert!((v - 1.0 / 15.0).abs() < 1e-14);
        let v = integrate(f64::cos, 0.0, 1.0, &gauss_legendre(16));
        assert!((v - 1f64.sin()).abs() < 1e-15);
    }
}
