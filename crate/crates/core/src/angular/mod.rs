//! Angular phase profile and radial cutoff families.

pub mod cutoff;
pub mod profile;

pub use cutoff::{smoothstep, Cutoff, CutoffFamily, Ramp};
pub use profile::AngularProfile;
