//! Finite-difference PDE residuals and the jet-versus-difference comparison.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::fd::{derivatives, FdScheme};
use super::sampling::{stratified, Sample, StencilGuard};
use crate::annulus::{FieldPoint, RegionClass};
use crate::error::Result;
use crate::plane::PlaneSolution;
use crate::Cplx;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub max_rel: f64,
    pub p99_rel: f64,
    pub sample_count: usize,
}

impl Stats {
    pub fn from_values(mut v: Vec<f64>) -> Self {
        if v.is_empty() {
            return Self { max_rel: 0.0, p99_rel: 0.0, sample_count: 0 };
        }
        v.sort_by(f64::total_cmp);
        let idx = ((0.99 * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1;
        Self { max_rel: v[v.len() - 1], p99_rel: v[idx], sample_count: v.len() }
    }
}

/// u(r, phi) / exp(rf), summed term by term so exact zeros of u are harmless.
pub(crate) fn scaled_value(plane: &PlaneSolution, r: f64, phi: f64, rf: Cplx) -> Result<Cplx> {
    let g = plane.point_polar(r, phi)?;
    let shift = rf - g.scale.ln();
    Ok(g.field.terms().iter().map(|t| (t.v - shift).exp()).sum())
}

/// step_r * r, shrunk where the radial log-derivative of u exceeds n_max / r
/// (only in the transition zone of the inner disk).
pub(crate) fn radial_step(step_r: f64, r: f64, fp: &FieldPoint, n_max: f64) -> f64 {
    // Weighted by term size so a negligible term near its cutoff does not count.
    let rf = fp.reference().re;
    let (mut num, mut den) = (0.0, 0.0);
    for t in fp.terms() {
        let w = (t.v.re - rf).exp();
        num += w * t.r.norm();
        den += w;
    }
    let lr = num / den;
    step_r * r / (r * lr / n_max).max(1.0)
}

pub struct PointResidual {
    pub class: RegionClass,
    pub fd: f64,
    pub fd_vs_jet: f64,
    pub fallback: bool,
}

pub fn residual_at(plane: &PlaneSolution, s: &Sample, scheme: &FdScheme) -> Result<PointResidual> {
    let g = plane.point_polar(s.r, s.phi)?;
    let rf = g.field.reference() + g.scale.ln();
    let f = |r: f64, p: f64| scaled_value(plane, r, p, rf);
    let n_max = plane.max_wavenumber(s.r)?;
    let h = radial_step(scheme.step_r, s.r, &g.field, n_max);
    let k = scheme.step_phi / n_max;
    let d = derivatives(&f, s.r, s.phi, h, k, scheme.richardson, false)?;
    let lam = plane.config.lambda;
    let pot = g.potential()?;
    let lap = d.laplacian(s.r);
    let pu = pot.apply(d.u, d.r, d.p, s.r);
    let den = lap.norm() + (lam * d.u).norm() + pu.norm();
    let fd = if den > scheme.relative_floor { (lap + lam * d.u - pu).norm() / den } else { 0.0 };

    let j = g.field.scaled();
    let lap_j = j.laplacian(s.r);
    let pu_j = pot.apply(j.v, j.r, j.p, s.r);
    let den_j = lap_j.norm() + (lam * j.v).norm() + pu_j.norm();
    let fd_vs_jet = if den_j > scheme.relative_floor { (lap - lap_j).norm() / den_j } else { 0.0 };
    let fallback = matches!(pot, crate::annulus::PotentialValue::Vector { fallback: true, .. });
    Ok(PointResidual { class: s.class, fd, fd_vs_jet, fallback })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub scheme: FdScheme,
    pub per_class: BTreeMap<String, Stats>,
    pub overall: Stats,
    /// Max relative gap between the difference Laplacian and the jet Laplacian.
    pub fd_vs_jet_max: f64,
    pub fallback_solves: usize,
    pub eval_errors: Vec<String>,
}

/// Relative residual |Delta u + lambda u - P u| / (|Delta u| + |lambda u| + |P u|)
/// at `per_class` stratified points per class and annulus.
pub fn residual_check(plane: &PlaneSolution, scheme: &FdScheme, per_class: usize, seed: u64) -> ResidualReport {
    let guard = StencilGuard { r_rel: 2.0 * scheme.step_r, phi_units: 2.0 * scheme.step_phi };
    let samples = stratified(plane, per_class, seed, guard);
    let results: Vec<(Sample, Result<PointResidual>)> =
        samples.par_iter().map(|s| (*s, residual_at(plane, s, scheme))).collect();
    let mut by_class: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let mut all = Vec::with_capacity(results.len());
    let mut fd_vs_jet_max: f64 = 0.0;
    let mut fallback_solves = 0;
    let mut eval_errors = Vec::new();
    for (s, res) in results {
        match res {
            Ok(p) => {
                by_class.entry(p.class.name().to_string()).or_default().push(p.fd);
                all.push(p.fd);
                fd_vs_jet_max = fd_vs_jet_max.max(p.fd_vs_jet);
                fallback_solves += p.fallback as usize;
            }
            Err(e) => eval_errors.push(format!("r={} phi={} {}: {e}", s.r, s.phi, s.class.name())),
        }
    }
    ResidualReport {
        scheme: *scheme,
        per_class: by_class.into_iter().map(|(k, v)| (k, Stats::from_values(v))).collect(),
        overall: Stats::from_values(all),
        fd_vs_jet_max,
        fallback_solves,
        eval_errors,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JetReport {
    pub points: usize,
    pub max_first: f64,
    pub max_second: f64,
    pub eval_errors: Vec<String>,
}

const JET_STEP_R2: f64 = 2e-5;
const JET_STEP_PHI2: f64 = 0.02;

pub fn jet_errors_at(plane: &PlaneSolution, s: &Sample) -> Result<(f64, f64)> {
    let g = plane.point_polar(s.r, s.phi)?;
    let rf_local = g.field.reference();
    let rf = rf_local + g.scale.ln();
    let f = |r: f64, p: f64| scaled_value(plane, r, p, rf);
    let r = s.r;
    let n_max = plane.max_wavenumber(r)?;
    let d1 = derivatives(&f, r, s.phi, radial_step(1e-6, r, &g.field, n_max), 1e-7, true, false)?;
    let h2 = radial_step(JET_STEP_R2, r, &g.field, n_max);
    let d2 = derivatives(&f, r, s.phi, h2, JET_STEP_PHI2 / n_max, true, true)?;
    let j = g.field.scaled();

    // Natural magnitudes: sum over terms of |E_i| times the gradient scales of log E_i.
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for t in g.field.terms() {
        let m = (t.v.re - rf_local.re).exp();
        let g1 = t.r.norm() + t.p.norm() / r;
        s1 += m * g1;
        s2 += m * (g1 * g1 + t.rr.norm() + t.rp.norm() / r + t.pp.norm() / (r * r));
    }
    let first = ((d1.r - j.r).norm()).max((d1.p - j.p).norm() / r) / s1;
    let second = ((d2.rr - j.rr).norm())
        .max((d2.rp - j.rp).norm() / r)
        .max((d2.pp - j.pp).norm() / (r * r))
        / s2;
    Ok((first, second))
}

/// Compares the analytic jets of u (scaled by its dominant term) with
/// Richardson-extrapolated central differences.
pub fn jet_check(plane: &PlaneSolution, per_class: usize, seed: u64) -> JetReport {
    let guard = StencilGuard { r_rel: 2.0 * JET_STEP_R2, phi_units: 2.0 * JET_STEP_PHI2 };
    let samples = stratified(plane, per_class, seed ^ 0x6a65_7473, guard);
    let results: Vec<(Sample, Result<(f64, f64)>)> =
        samples.par_iter().map(|s| (*s, jet_errors_at(plane, s))).collect();
    let mut rep = JetReport { points: 0, max_first: 0.0, max_second: 0.0, eval_errors: Vec::new() };
    for (s, res) in results {
        match res {
            Ok((a, b)) => {
                rep.points += 1;
                rep.max_first = rep.max_first.max(a);
                rep.max_second = rep.max_second.max(b);
            }
            Err(e) => rep.eval_errors.push(format!("r={} phi={}: {e}", s.r, s.phi)),
        }
    }
    rep
}
