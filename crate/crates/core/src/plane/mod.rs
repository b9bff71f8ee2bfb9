//! Chains annuli along the ladder rho_{j+1} = rho_j + 6 sqrt(rho_j) and fills the
//! inner disk, giving one field on |x| <= rho_{J+1}.

mod inner;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use inner::InnerDisk;

use crate::annulus::{
    ladder_index, next_rho, AnnulusParams, AnnulusSolution, FieldPoint, Mode, PotentialValue, RHO_MIN,
};
use crate::error::{Error, Result};
use crate::{Cplx, LogComplex};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneConfig {
    pub rho1: f64,
    pub lambda: Cplx,
    pub mode: Mode,
    pub annuli: usize,
}

impl PlaneConfig {
    pub fn validate(&self) -> Result<()> {
        if self.annuli == 0 {
            return Err(Error::Config("annuli must be >= 1".into()));
        }
        if !self.rho1.is_finite() || self.rho1 < RHO_MIN {
            return Err(Error::Config(format!("rho1 must be >= {RHO_MIN}")));
        }
        if !self.lambda.re.is_finite() || !self.lambda.im.is_finite() {
            return Err(Error::Config("lambda must be finite".into()));
        }
        if self.mode == Mode::MeshNX && (self.lambda.im != 0.0 || !(self.lambda.re > 0.0)) {
            return Err(Error::Config("mesh-nx needs real lambda > 0".into()));
        }
        Ok(())
    }

    /// rho_1 .. rho_{J+1}.
    pub fn radii(&self) -> Vec<f64> {
        let mut v = vec![self.rho1];
        for _ in 0..self.annuli {
            v.push(next_rho(*v.last().unwrap()));
        }
        v
    }
}

#[derive(Debug, Clone)]
pub struct PlaneSolution {
    pub config: PlaneConfig,
    pub annuli: Vec<AnnulusSolution>,
    /// prod_{i<j} a_i for annulus j (0-based); one entry per annulus.
    pub scales: Vec<LogComplex>,
    pub inner: InnerDisk,
    pub radii: Vec<f64>,
}

/// A point of the global field with the owning piece.
#[derive(Debug, Clone, Copy)]
pub struct GlobalPoint {
    /// None for the inner disk.
    pub annulus: Option<usize>,
    pub field: FieldPoint,
    pub scale: LogComplex,
}

impl GlobalPoint {
    pub fn value(&self) -> Result<LogComplex> {
        Ok(self.field.value()? * self.scale)
    }

    pub fn potential(&self) -> Result<PotentialValue> {
        self.field.potential()
    }
}

pub fn build_plane(config: PlaneConfig) -> Result<PlaneSolution> {
    config.validate()?;
    let radii = config.radii();
    let mut params = Vec::with_capacity(config.annuli);
    for j in 0..config.annuli {
        let n = ladder_index(radii[j], config.lambda, config.mode)?;
        let n_next = ladder_index(radii[j + 1], config.lambda, config.mode)?;
        if n_next <= n {
            return Err(Error::Index(format!("k_{} <= 0", j + 1)));
        }
        params.push(AnnulusParams { rho: radii[j], lambda: config.lambda, mode: config.mode, n, k: n_next - n });
    }
    let annuli: Vec<AnnulusSolution> =
        params.into_par_iter().map(AnnulusSolution::build).collect::<Result<Vec<_>>>()?;
    let mut scales = Vec::with_capacity(annuli.len());
    let mut acc = LogComplex::one();
    for a in &annuli {
        scales.push(acc);
        acc = acc * a.a;
    }
    let inner = InnerDisk::new(annuli[0].params.n, config.lambda, config.rho1, config.mode)?;
    Ok(PlaneSolution { config, annuli, scales, inner, radii })
}

impl PlaneSolution {
    pub fn outer_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// Index of the annulus owning r (half-open, last closed); None inside rho_1.
    pub fn owner(&self, r: f64) -> Result<Option<usize>> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::OutOfDomain(format!("r = {r} (the origin is excluded)")));
        }
        if r > self.outer_radius() {
            return Err(Error::OutOfDomain(format!("r = {r} beyond rho_(J+1) = {}", self.outer_radius())));
        }
        if r < self.config.rho1 {
            return Ok(None);
        }
        let j = self.radii.partition_point(|&x| x <= r);
        Ok(Some((j - 1).min(self.annuli.len() - 1)))
    }

    pub fn point_polar(&self, r: f64, phi: f64) -> Result<GlobalPoint> {
        match self.owner(r)? {
            None => Ok(GlobalPoint { annulus: None, field: self.inner.field_point(r, phi)?, scale: LogComplex::one() }),
            Some(j) => {
                Ok(GlobalPoint { annulus: Some(j), field: self.annuli[j].field_point(r, phi)?, scale: self.scales[j] })
            }
        }
    }

    pub fn eval_global(&self, x: [f64; 2]) -> Result<(LogComplex, PotentialValue)> {
        let r = x[0].hypot(x[1]);
        let p = self.point_polar(r, x[1].atan2(x[0]))?;
        Ok((p.value()?, p.potential()?))
    }

    /// u on annulus j evaluated with that annulus' own formulas, even at the
    /// shared boundary radius.
    pub fn eval_on_annulus(&self, j: usize, r: f64, phi: f64) -> Result<LogComplex> {
        Ok(self.annuli[j].field_point(r, phi)?.value()? * self.scales[j])
    }

    /// ln m(r) on the angular grid of the owning piece.
    pub fn ln_grid_max(&self, r: f64) -> Result<f64> {
        match self.owner(r)? {
            None => self.inner.ln_grid_max(r),
            Some(j) => {
                let a = &self.annuli[j];
                Ok(a.ln_grid_max(r, a.angle_count())? + self.scales[j].logmod)
            }
        }
    }

    /// ln M(r) including the telescoped scale; None inside the inner disk.
    pub fn ln_envelope(&self, r: f64) -> Result<Option<f64>> {
        match self.owner(r)? {
            None => Ok(None),
            Some(j) => Ok(Some(self.annuli[j].ln_envelope(r)? + self.scales[j].logmod)),
        }
    }

    /// Largest angular wavenumber in the piece owning r.
    pub fn max_wavenumber(&self, r: f64) -> Result<f64> {
        Ok(match self.owner(r)? {
            None => self.inner.n1 as f64,
            Some(j) => self.annuli[j].max_wavenumber(),
        })
    }
}
