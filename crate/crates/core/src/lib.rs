//! Log-space construction of decaying solutions of (Delta + lambda - V) u = 0
//! and (Delta + lambda - W . grad) u = 0 on the plane, with numerical checks.

pub mod angular;
pub mod annulus;
pub mod branch;
pub mod error;
pub mod plane;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Cplx = num_complex::Complex<f64>;
pub type LogComplex = branch::LogComplex<f64>;
pub type Jet2 = branch::Jet2<f64>;
pub type MuParams = branch::MuParams<f64>;
pub type AngularProfile = angular::AngularProfile<f64>;
pub type Cutoff = angular::Cutoff<f64>;
pub type CutoffFamily = angular::CutoffFamily<f64>;

pub use annulus::{AnnulusParams, AnnulusSolution, Mode, PotentialValue, RegionClass};
pub use plane::{build_plane, PlaneConfig, PlaneSolution};
