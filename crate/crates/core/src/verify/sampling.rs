//! Stratified random points: a fixed quota per region class per annulus plus
//! the inner disk, drawn from a seeded ChaCha stream in a fixed order.
//!
//! u is only C^2 across cutoff ramp ends and profile kinks, so no central
//! difference converges on a stencil that straddles one. Points whose stencil
//! would reach such a breakpoint are redrawn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::annulus::{AnnulusSolution, RegionClass};
use crate::plane::PlaneSolution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub annulus: Option<usize>,
    pub class: RegionClass,
    pub r: f64,
    pub phi: f64,
}

/// Half-widths of the stencil to keep clear of breakpoints: `r_rel * r`
/// radially and `phi_units / n_max` in angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilGuard {
    pub r_rel: f64,
    pub phi_units: f64,
}

impl StencilGuard {
    pub const NONE: StencilGuard = StencilGuard { r_rel: 0.0, phi_units: 0.0 };
}

/// Keeps points off the class boundaries themselves.
const EDGE: f64 = 1e-3;
const MAX_DRAWS: usize = 200;

fn class_interval(a: &AnnulusSolution, class: RegionClass) -> (f64, f64) {
    let target = match class {
        RegionClass::Step1Sector => RegionClass::Step1Window,
        c => c,
    };
    let p = a.pieces.iter().find(|p| p.class == target).expect("every class has a piece");
    let pad = EDGE * a.sqrt_rho();
    (p.r_lo + pad, p.r_hi - pad)
}

fn clear_of(x: f64, points: &[f64], half: f64) -> bool {
    points.iter().all(|&b| (x - b).abs() > half)
}

struct Annulus<'a> {
    a: &'a AnnulusSolution,
    radial: Vec<f64>,
    kinks: [f64; 4],
}

impl Annulus<'_> {
    fn ok(&self, r: f64, phi: f64, g: StencilGuard) -> bool {
        if !clear_of(r, &self.radial, g.r_rel * r) {
            return false;
        }
        let p = &self.a.profile;
        let loc = p.reduce(phi);
        let half = g.phi_units / self.a.max_wavenumber();
        let t = p.period;
        clear_of(loc, &self.kinks, half) && loc > half && loc < t - half
    }

    fn draw(&self, class: RegionClass, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let (lo, hi) = class_interval(self.a, class);
        let r = rng.gen_range(lo..hi);
        let t = self.a.profile.period;
        let periods = 2 * (self.a.params.n + self.a.params.k);
        let phi = match class {
            RegionClass::Step1Window => {
                let m = rng.gen_range(0..periods) as f64;
                m * t + rng.gen_range(-0.2 * t..0.2 * t)
            }
            RegionClass::Step1Sector => {
                let m = rng.gen_range(0..periods) as f64;
                m * t + rng.gen_range(0.2 * t..0.8 * t)
            }
            _ => rng.gen_range(0.0..std::f64::consts::TAU),
        };
        (r, phi)
    }
}

/// `per_class` points in every class of every annulus, then `per_class`
/// points in the inner disk on (0.05 rho1, rho1).
pub fn stratified(plane: &PlaneSolution, per_class: usize, seed: u64, guard: StencilGuard) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_class * (9 * plane.annuli.len() + 1));
    for (j, a) in plane.annuli.iter().enumerate() {
        let an = Annulus { a, radial: a.radial_breakpoints(), kinks: a.profile.kinks() };
        for class in RegionClass::ANNULUS {
            for _ in 0..per_class {
                let mut pt = an.draw(class, &mut rng);
                for _ in 0..MAX_DRAWS {
                    if an.ok(pt.0, pt.1, guard) {
                        break;
                    }
                    pt = an.draw(class, &mut rng);
                }
                out.push(Sample { annulus: Some(j), class, r: pt.0, phi: pt.1 });
            }
        }
    }
    let rho1 = plane.config.rho1;
    let inner_breaks = [0.4 * rho1, 0.6 * rho1];
    for _ in 0..per_class {
        let mut r = rng.gen_range(0.05 * rho1..(1.0 - EDGE) * rho1);
        for _ in 0..MAX_DRAWS {
            if clear_of(r, &inner_breaks, guard.r_rel * r) {
                break;
            }
            r = rng.gen_range(0.05 * rho1..(1.0 - EDGE) * rho1);
        }
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        out.push(Sample { annulus: None, class: RegionClass::InnerDisk, r, phi });
    }
    out
}
