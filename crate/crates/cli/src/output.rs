//! Manifest and CSV writers.

use std::fmt::Write as _;
use std::path::Path;

use annulus_core::annulus::big_lambda;
use annulus_core::{LogComplex, Mode, PlaneSolution, PotentialValue, Result};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Polar {
    pub logmod: f64,
    pub phase: f64,
}

impl From<LogComplex> for Polar {
    fn from(z: LogComplex) -> Self {
        Self { logmod: z.logmod, phase: z.wrapped_phase() }
    }
}

#[derive(Debug, Serialize)]
pub struct AnnulusEntry {
    pub j: usize,
    pub rho: f64,
    pub rho_next: f64,
    pub n: u64,
    pub k: u64,
    /// The value k should track: 12 sqrt(Lambda) sqrt(rho) for mesh-n and
    /// mesh-p, the ladder difference for mesh-nx.
    pub k_target: f64,
    pub n_margin: f64,
    pub k_margin: f64,
    pub b: Polar,
    pub d: Polar,
    pub b1: Polar,
    pub a: Polar,
    pub cum_scale: Polar,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub mode: Mode,
    pub lambda: [f64; 2],
    pub rho1: f64,
    pub annuli: usize,
    pub outer_radius: f64,
    pub inner_n1: u64,
    /// lambda = 0, so every mu is identically 1.
    pub degenerate_mu: bool,
    pub ladder: Vec<AnnulusEntry>,
}

pub fn manifest(plane: &PlaneSolution) -> Manifest {
    let c = plane.config;
    let ladder = plane
        .annuli
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let p = a.params;
            let (dn, dk) = p.index_margins();
            let k_target = match c.mode {
                Mode::MeshN | Mode::MeshP => 12.0 * big_lambda(c.lambda).sqrt() * p.sqrt_rho(),
                Mode::MeshNX => {
                    let nr = |r: f64| c.lambda.re.sqrt() * (r + 8.0 * r.sqrt());
                    nr(p.outer()) - nr(p.rho)
                }
            };
            AnnulusEntry {
                j: j + 1,
                rho: p.rho,
                rho_next: p.outer(),
                n: p.n,
                k: p.k,
                k_target,
                n_margin: dn,
                k_margin: dk,
                b: a.b.into(),
                d: a.d.into(),
                b1: a.b1.into(),
                a: a.a.into(),
                cum_scale: plane.scales[j].into(),
            }
        })
        .collect();
    Manifest {
        schema_version: 1,
        mode: c.mode,
        lambda: [c.lambda.re, c.lambda.im],
        rho1: c.rho1,
        annuli: c.annuli,
        outer_radius: plane.outer_radius(),
        inner_n1: plane.inner.n1,
        degenerate_mu: plane.annuli.iter().any(|a| a.degenerate_mu),
        ladder,
    }
}

/// Linear values are written only while they fit in a double.
const LINEAR_LIMIT: f64 = 700.0;

pub fn u_csv(plane: &PlaneSolution, points: &[(f64, f64)]) -> Result<String> {
    let mut s = String::from("r,phi,log_mod,phase,re,im\n");
    for &(r, phi) in points {
        let u = plane.point_polar(r, phi)?.value()?;
        let (re, im) = if u.logmod.abs() <= LINEAR_LIMIT {
            let z = u.to_complex();
            (z.re.to_string(), z.im.to_string())
        } else {
            (String::new(), String::new())
        };
        let _ = writeln!(s, "{r},{phi},{},{},{re},{im}", u.logmod, u.wrapped_phase());
    }
    Ok(s)
}

pub fn potential_csv(plane: &PlaneSolution, points: &[(f64, f64)]) -> Result<String> {
    let mut s = String::from(if plane.config.mode.is_vector() {
        "r,phi,w1_re,w1_im,w2_re,w2_im\n"
    } else {
        "r,phi,v_re,v_im\n"
    });
    for &(r, phi) in points {
        match plane.point_polar(r, phi)?.potential()? {
            PotentialValue::Scalar(v) => {
                let _ = writeln!(s, "{r},{phi},{},{}", v.re, v.im);
            }
            PotentialValue::Vector { w1, w2, .. } => {
                let _ = writeln!(s, "{r},{phi},{},{},{},{}", w1.re, w1.im, w2.re, w2.im);
            }
        }
    }
    Ok(s)
}

/// ln M is empty inside the inner disk, where no envelope is defined.
pub fn envelope_csv(plane: &PlaneSolution, radii: &[f64]) -> Result<String> {
    let mut s = String::from("r,ln_M,ln_m\n");
    for &r in radii {
        let big = plane.ln_envelope(r)?.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{r},{big},{}", plane.ln_grid_max(r)?);
    }
    Ok(s)
}

pub fn write(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)
}

pub fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}
