//! Decay along the ladder, boundary states and interface continuity.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::plane::PlaneSolution;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub ladder: Vec<f64>,
    /// ln m(rho_j) on the 8(n + k) angular grid.
    pub ln_m: Vec<f64>,
    /// ln M(rho_j).
    pub ln_envelope: Vec<f64>,
    /// ln m(rho_j + 6 sqrt(rho_j)) - ln m(rho_j), per annulus.
    pub increments: Vec<f64>,
    /// -increment / width, per annulus.
    pub implied_c: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// max |c_j - median| / median over annuli 2..J.
    pub spread: f64,
    pub telescoping_rel_err: f64,
    pub strictly_decreasing: bool,
    pub max_m_over_envelope: f64,
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Ordinary least squares y = slope x + intercept.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn decay_check(plane: &PlaneSolution) -> Result<DecayReport> {
    let ladder = plane.radii.clone();
    let ln_m = ladder.par_iter().map(|&r| plane.ln_grid_max(r)).collect::<Result<Vec<_>>>()?;
    let ln_env = ladder
        .iter()
        .map(|&r| plane.ln_envelope(r).map(|v| v.unwrap_or(f64::NAN)))
        .collect::<Result<Vec<_>>>()?;
    let increments = plane.annuli.par_iter().map(|a| a.decay_increment()).collect::<Result<Vec<_>>>()?;
    let implied_c: Vec<f64> =
        plane.annuli.iter().zip(&increments).map(|(a, inc)| -inc / (a.outer() - a.rho())).collect();
    let (slope, intercept) = least_squares(&ladder, &ln_m);
    let tail = if implied_c.len() > 1 { &implied_c[1..] } else { &implied_c[..] };
    let med = median(tail);
    let spread = tail.iter().map(|c| (c - med).abs() / med.abs()).fold(0.0, f64::max);
    let total: f64 = increments.iter().sum();
    let diff = ln_m[ln_m.len() - 1] - ln_m[0];
    let telescoping_rel_err = (total - diff).abs() / diff.abs().max(f64::MIN_POSITIVE);
    let strictly_decreasing = ln_m.windows(2).all(|w| w[1] < w[0]);
    let max_m_over_envelope = ln_m.iter().zip(&ln_env).map(|(m, e)| m - e).fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayReport {
        ladder,
        ln_m,
        ln_envelope: ln_env,
        increments,
        implied_c,
        slope,
        intercept,
        spread,
        telescoping_rel_err,
        strictly_decreasing,
        max_m_over_envelope,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    /// Max relative mismatch between the closed-form edge states and u on
    /// [rho_j, rho_j + 0.1 sqrt(rho_j)] and [rho_j + 5.9 sqrt(rho_j), rho_{j+1}].
    pub boundary_state_max: f64,
    pub boundary_points: usize,
    /// Per rho_j (starting with rho_1 against the inner disk), max relative
    /// mismatch between the two adjacent pieces.
    pub interface_jumps: Vec<f64>,
}

const EDGE_RADII: usize = 8;
const EDGE_ANGLES: usize = 16;

pub fn continuity_check(plane: &PlaneSolution) -> Result<ContinuityReport> {
    let per_annulus = plane
        .annuli
        .par_iter()
        .map(|a| -> Result<(f64, usize)> {
            let s = a.sqrt_rho();
            let mut worst: f64 = 0.0;
            let mut count = 0;
            for i in 0..EDGE_RADII {
                let t = i as f64 / (EDGE_RADII - 1) as f64;
                let r_in = a.rho() + 0.1 * s * t;
                let r_out = a.rho() + 5.9 * s + (a.outer() - a.rho() - 5.9 * s) * t;
                for q in 0..EDGE_ANGLES {
                    let phi = std::f64::consts::TAU * (q as f64 + 0.31) / EDGE_ANGLES as f64;
                    let u = a.field_point(r_in, phi)?.value()?;
                    worst = worst.max(u.rel_diff(&a.inner_state(r_in, phi)?));
                    let u = a.field_point(r_out, phi)?.value()?;
                    worst = worst.max(u.rel_diff(&a.outer_state(r_out, phi)?));
                    count += 2;
                }
            }
            Ok((worst, count))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut jumps = Vec::with_capacity(plane.annuli.len());
    let angles: Vec<f64> = (0..64).map(|q| std::f64::consts::TAU * (q as f64 + 0.17) / 64.0).collect();
    let rho1 = plane.radii[0];
    let mut first: f64 = 0.0;
    for &phi in &angles {
        let a = plane.inner.field_point(rho1, phi)?.value()?;
        first = first.max(a.rel_diff(&plane.eval_on_annulus(0, rho1, phi)?));
    }
    jumps.push(first);
    for j in 1..plane.annuli.len() {
        let r = plane.radii[j];
        let mut worst: f64 = 0.0;
        for &phi in &angles {
            let a = plane.eval_on_annulus(j - 1, r, phi)?;
            worst = worst.max(a.rel_diff(&plane.eval_on_annulus(j, r, phi)?));
        }
        jumps.push(worst);
    }
    Ok(ContinuityReport {
        boundary_state_max: per_annulus.iter().map(|x| x.0).fold(0.0, f64::max),
        boundary_points: per_annulus.iter().map(|x| x.1).sum(),
        interface_jumps: jumps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::{cx, Mode};
    use crate::plane::{build_plane, PlaneConfig};

    #[test]
    fn fit_recovers_a_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| -0.5 * v + 2.0).collect();
        let (s, i) = least_squares(&x, &y);
        assert!((s + 0.5).abs() < 1e-14 && (i - 2.0).abs() < 1e-14);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn short_plane_decays_and_glues() {
        let p = build_plane(PlaneConfig { rho1: 900.0, lambda: cx(1.0, 0.0), mode: Mode::MeshN, annuli: 3 }).unwrap();
        let d = decay_check(&p).unwrap();
        assert!(d.strictly_decreasing && d.slope < 0.0);
        assert!(d.telescoping_rel_err < 1e-6);
        assert!(d.max_m_over_envelope <= 1e-9);
        let c = continuity_check(&p).unwrap();
        assert!(c.boundary_state_max < 1e-12, "{}", c.boundary_state_max);
        assert!(c.interface_jumps.iter().all(|&j| j < 1e-9));
    }
}
