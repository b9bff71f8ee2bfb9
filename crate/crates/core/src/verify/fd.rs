//! Central differences in polar coordinates with optional Richardson level.

use serde::Serialize;

use crate::error::Result;
use crate::Cplx;

/// Steps are relative: the radial step is `step_r * r`, the angular step is
/// `step_phi / n_max` with n_max the largest angular wavenumber present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdScheme {
    pub step_r: f64,
    pub step_phi: f64,
    pub richardson: bool,
    /// Denominators below this are treated as zero.
    pub relative_floor: f64,
}

impl Default for FdScheme {
    fn default() -> Self {
        Self { step_r: 1e-5, step_phi: 0.05, richardson: true, relative_floor: 1e-300 }
    }
}

impl FdScheme {
    pub fn scaled(&self, factor: f64) -> Self {
        Self { step_r: self.step_r * factor, step_phi: self.step_phi * factor, ..*self }
    }

    /// Whether the angular step resolves the fastest oscillation.
    pub fn resolves(&self) -> bool {
        self.step_phi <= 0.05 + 1e-15
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdDerivs {
    pub u: Cplx,
    pub r: Cplx,
    pub p: Cplx,
    pub rr: Cplx,
    pub pp: Cplx,
    pub rp: Cplx,
}

impl FdDerivs {
    pub fn laplacian(&self, r: f64) -> Cplx {
        self.rr + self.r / r + self.pp / (r * r)
    }
}

fn level<F>(f: &F, r: f64, phi: f64, u0: Cplx, h: f64, k: f64, mixed: bool) -> Result<FdDerivs>
where
    F: Fn(f64, f64) -> Result<Cplx>,
{
    let (rp, rm) = (f(r + h, phi)?, f(r - h, phi)?);
    let (pp, pm) = (f(r, phi + k)?, f(r, phi - k)?);
    let rp_mixed = if mixed {
        (f(r + h, phi + k)? - f(r + h, phi - k)? - f(r - h, phi + k)? + f(r - h, phi - k)?) / (4.0 * h * k)
    } else {
        Cplx::new(0.0, 0.0)
    };
    Ok(FdDerivs {
        u: u0,
        r: (rp - rm) / (2.0 * h),
        p: (pp - pm) / (2.0 * k),
        rr: (rp - 2.0 * u0 + rm) / (h * h),
        pp: (pp - 2.0 * u0 + pm) / (k * k),
        rp: rp_mixed,
    })
}

/// Derivatives of `f` at (r, phi) with steps h, k; with `richardson` the
/// steps h/2, k/2 are added and combined to cancel the leading error term.
pub fn derivatives<F>(f: &F, r: f64, phi: f64, h: f64, k: f64, richardson: bool, mixed: bool) -> Result<FdDerivs>
where
    F: Fn(f64, f64) -> Result<Cplx>,
{
    let u0 = f(r, phi)?;
    let a = level(f, r, phi, u0, h, k, mixed)?;
    if !richardson {
        return Ok(a);
    }
    let b = level(f, r, phi, u0, h / 2.0, k / 2.0, mixed)?;
    let x = |fine: Cplx, coarse: Cplx| (4.0 * fine - coarse) / 3.0;
    Ok(FdDerivs {
        u: u0,
        r: x(b.r, a.r),
        p: x(b.p, a.p),
        rr: x(b.rr, a.rr),
        pp: x(b.pp, a.pp),
        rp: x(b.rp, a.rp),
    })
}
