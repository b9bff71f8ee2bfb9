//! Complex kernels with explicit branch handling.

pub mod complex;
pub mod jet;
pub mod logc;
pub mod special;

pub use complex::{guard_cut, near_cut, normalize_zero, principal_ln, principal_sqrt, wrap_phase};
pub use jet::Jet2;
pub use logc::LogComplex;
pub use special::{phi_ab, phi_ab_path_check, radical, turning_point_check, MuParams};
