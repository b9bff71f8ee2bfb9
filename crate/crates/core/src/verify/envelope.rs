//! Potential envelopes on a polar grid covering every annulus.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::annulus::{AnnulusSolution, Mode};
use crate::error::Result;
use crate::plane::PlaneSolution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeGrid {
    pub radii_per_annulus: usize,
    /// Angles per radius in units of n + k.
    pub angle_factor: usize,
}

impl Default for EnvelopeGrid {
    fn default() -> Self {
        Self { radii_per_annulus: 24, angle_factor: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct ClassEnvelope {
    /// sup |P| sqrt(r)
    pub sup_sqrt_r: f64,
    /// sup |P| r
    pub sup_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    /// "C_V", "C_W" or "C_VX".
    pub name: String,
    /// sup of the mode's normalised potential over the grid.
    pub constant: f64,
    pub per_annulus: Vec<f64>,
    pub per_class: BTreeMap<String, ClassEnvelope>,
    /// max over grid radii of ln m(r) - ln M(r); m <= M means this is <= 0.
    pub max_log_excess: f64,
    pub points: usize,
    pub fallback_solves: usize,
    pub eval_errors: Vec<String>,
}

/// The mode's normalisation of |P| at radius r, with <x> = sqrt(1 + r^2).
pub fn normalised(mode: Mode, magnitude: f64, r: f64) -> f64 {
    let jx = (1.0 + r * r).sqrt();
    match mode {
        Mode::MeshN => magnitude * jx.sqrt() / jx.ln(),
        Mode::MeshP | Mode::MeshNX => magnitude * jx.sqrt(),
    }
}

pub fn constant_name(mode: Mode) -> &'static str {
    match mode {
        Mode::MeshN => "C_V",
        Mode::MeshP => "C_W",
        Mode::MeshNX => "C_VX",
    }
}

struct RadiusResult {
    sup: f64,
    per_class: BTreeMap<&'static str, ClassEnvelope>,
    excess: f64,
    points: usize,
    fallback: usize,
    errors: Vec<String>,
}

fn scan_radius(a: &AnnulusSolution, mode: Mode, r: f64, count: usize) -> Result<RadiusResult> {
    let mut out = RadiusResult {
        sup: 0.0,
        per_class: BTreeMap::new(),
        excess: f64::NEG_INFINITY,
        points: 0,
        fallback: 0,
        errors: Vec::new(),
    };
    let step = std::f64::consts::TAU / count as f64;
    let mut ln_m = f64::NEG_INFINITY;
    for i in 0..count {
        let phi = i as f64 * step;
        let fp = a.field_point(r, phi)?;
        match fp.value() {
            Ok(v) => ln_m = ln_m.max(v.logmod),
            Err(e) => out.errors.push(format!("r={r} phi={phi}: {e}")),
        }
        match fp.potential() {
            Ok(p) => {
                let m = p.magnitude();
                out.sup = out.sup.max(normalised(mode, m, r));
                let e = out.per_class.entry(fp.class.name()).or_default();
                e.sup_sqrt_r = e.sup_sqrt_r.max(m * r.sqrt());
                e.sup_r = e.sup_r.max(m * r);
                out.points += 1;
                if let crate::annulus::PotentialValue::Vector { fallback: true, .. } = p {
                    out.fallback += 1;
                }
            }
            Err(e) => out.errors.push(format!("r={r} phi={phi}: {e}")),
        }
    }
    out.excess = ln_m - a.ln_envelope(r)?;
    Ok(out)
}

/// Radii rho + (i + 1/2) 6 sqrt(rho) / R, which never hit the exact zeros of u
/// at rho + sqrt(rho).
pub fn grid_radii(a: &AnnulusSolution, per_annulus: usize) -> Vec<f64> {
    let w = a.outer() - a.rho();
    (0..per_annulus).map(|i| a.rho() + (i as f64 + 0.5) * w / per_annulus as f64).collect()
}

pub fn envelope_check(plane: &PlaneSolution, grid: &EnvelopeGrid) -> EnvelopeReport {
    let mode = plane.config.mode;
    let jobs: Vec<(usize, f64)> = plane
        .annuli
        .iter()
        .enumerate()
        .flat_map(|(j, a)| grid_radii(a, grid.radii_per_annulus).into_iter().map(move |r| (j, r)))
        .collect();
    let results: Vec<(usize, f64, Result<RadiusResult>)> = jobs
        .par_iter()
        .map(|&(j, r)| {
            let a = &plane.annuli[j];
            let count = grid.angle_factor * (a.params.n + a.params.k) as usize;
            (j, r, scan_radius(a, mode, r, count))
        })
        .collect();
    let mut rep = EnvelopeReport {
        name: constant_name(mode).to_string(),
        constant: 0.0,
        per_annulus: vec![0.0; plane.annuli.len()],
        per_class: BTreeMap::new(),
        max_log_excess: f64::NEG_INFINITY,
        points: 0,
        fallback_solves: 0,
        eval_errors: Vec::new(),
    };
    for (j, r, res) in results {
        match res {
            Ok(x) => {
                rep.constant = rep.constant.max(x.sup);
                rep.per_annulus[j] = rep.per_annulus[j].max(x.sup);
                for (k, v) in x.per_class {
                    let e = rep.per_class.entry(k.to_string()).or_default();
                    e.sup_sqrt_r = e.sup_sqrt_r.max(v.sup_sqrt_r);
                    e.sup_r = e.sup_r.max(v.sup_r);
                }
                rep.max_log_excess = rep.max_log_excess.max(x.excess);
                rep.points += x.points;
                rep.fallback_solves += x.fallback;
                rep.eval_errors.extend(x.errors);
            }
            Err(e) => rep.eval_errors.push(format!("r={r}: {e}")),
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::cx;
    use crate::plane::{build_plane, PlaneConfig};

    #[test]
    fn finite_constant_and_m_below_envelope() {
        let p = build_plane(PlaneConfig { rho1: 900.0, lambda: cx(1.0, 0.0), mode: Mode::MeshN, annuli: 1 }).unwrap();
        let rep = envelope_check(&p, &EnvelopeGrid { radii_per_annulus: 6, angle_factor: 8 });
        assert!(rep.eval_errors.is_empty(), "{:?}", rep.eval_errors);
        assert!(rep.constant.is_finite() && rep.constant > 0.0);
        assert!(rep.max_log_excess <= 1e-9);
        assert_eq!(rep.points, 6 * 8 * (p.annuli[0].params.n + p.annuli[0].params.k) as usize);
    }
}
