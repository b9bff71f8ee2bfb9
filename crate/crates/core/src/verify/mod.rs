//! Independent numerical certification of a built plane solution.

pub mod decay;
pub mod envelope;
pub mod fd;
pub mod invariants;
pub mod report;
pub mod residual;
pub mod sampling;

pub use decay::{continuity_check, decay_check, ContinuityReport, DecayReport};
pub use envelope::{envelope_check, EnvelopeGrid, EnvelopeReport};
pub use fd::FdScheme;
pub use invariants::{invariant_sweep, Check, InvariantReport};
pub use report::{render_stability, render_text, stability_table, verify_plane, StabilityTable, VerificationReport, VerifyOptions};
pub use residual::{jet_check, residual_check, JetReport, ResidualReport, Stats};
