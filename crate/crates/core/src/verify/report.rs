//! Full verification run: every check, the acceptance gates, and the
//! cross-scale stability table.

use std::fmt::Write as _;

use serde::Serialize;

use super::decay::{continuity_check, decay_check, ContinuityReport, DecayReport};
use super::envelope::{envelope_check, EnvelopeGrid, EnvelopeReport};
use super::fd::FdScheme;
use super::invariants::{invariant_sweep, Check, InvariantReport};
use super::residual::{jet_check, residual_check, JetReport, ResidualReport};
use crate::annulus::{Mode, RegionClass};
use crate::plane::{PlaneConfig, PlaneSolution};

pub const SCHEMA_VERSION: u32 = 1;

/// Pinned acceptance thresholds.
pub mod gates {
    pub const RESIDUAL_P99: f64 = 1e-3;
    pub const RESIDUAL_MAX: f64 = 1e-2;
    pub const FD_VS_JET: f64 = 1e-4;
    pub const JET_FIRST: f64 = 1e-6;
    pub const JET_SECOND: f64 = 1e-4;
    pub const JET_POINTS: usize = 1000;
    pub const BOUNDARY_STATE: f64 = 1e-12;
    pub const INTERFACE: f64 = 1e-9;
    pub const DECAY_SPREAD: f64 = 0.5;
    pub const TELESCOPING: f64 = 1e-6;
    /// ln m - ln M, allowing for rounding in the envelope sum.
    pub const M_OVER_ENVELOPE: f64 = 1e-9;
    pub const STABILITY_LO: f64 = 0.5;
    pub const STABILITY_HI: f64 = 2.0;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub scheme: FdScheme,
    /// Residual points per region class per annulus.
    pub samples_per_class: usize,
    pub seed: u64,
    pub envelope: EnvelopeGrid,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { scheme: FdScheme::default(), samples_per_class: 100, seed: 0, envelope: EnvelopeGrid::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub config: PlaneConfig,
    pub options: VerifyOptions,
    pub residual: ResidualReport,
    pub jet: JetReport,
    pub envelope: EnvelopeReport,
    pub continuity: ContinuityReport,
    pub decay: Option<DecayReport>,
    /// min over sector grids of |e^{iS} - z(r)|.
    pub sector_margin: f64,
    pub invariants: InvariantReport,
    pub nx_radical: Option<f64>,
    pub gates: Vec<Check>,
    pub flags: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> Vec<&Check> {
        self.gates.iter().chain(&self.invariants.checks).filter(|c| !c.pass).collect()
    }
}

/// Jet points per class per annulus so that the total reaches JET_POINTS.
pub fn jet_quota(annuli: usize) -> usize {
    let classes = RegionClass::ANNULUS.len() * annuli + 1;
    gates::JET_POINTS.div_ceil(classes)
}

pub fn verify_plane(plane: &PlaneSolution, opts: &VerifyOptions) -> VerificationReport {
    let residual = residual_check(plane, &opts.scheme, opts.samples_per_class, opts.seed);
    let jet = jet_check(plane, jet_quota(plane.annuli.len()), opts.seed);
    let envelope = envelope_check(plane, &opts.envelope);
    let invariants = invariant_sweep(plane);
    let mut flags = Vec::new();
    if !opts.scheme.resolves() {
        flags.push(format!("angular step {}/n_max is coarser than 0.05/n_max", opts.scheme.step_phi));
    }
    let continuity = match continuity_check(plane) {
        Ok(c) => c,
        Err(e) => {
            flags.push(format!("continuity check failed to evaluate: {e}"));
            ContinuityReport { boundary_state_max: f64::INFINITY, boundary_points: 0, interface_jumps: vec![] }
        }
    };
    let decay = if plane.annuli.len() < 3 {
        flags.push("decay check skipped: needs at least 3 annuli".into());
        None
    } else {
        match decay_check(plane) {
            Ok(d) => Some(d),
            Err(e) => {
                flags.push(format!("decay check failed to evaluate: {e}"));
                None
            }
        }
    };

    let mut g = vec![
        Check::at_most("residual_p99", residual.overall.p99_rel, gates::RESIDUAL_P99),
        Check::at_most("residual_max", residual.overall.max_rel, gates::RESIDUAL_MAX),
        Check::at_most("fd_vs_jet_laplacian", residual.fd_vs_jet_max, gates::FD_VS_JET),
        Check::at_most("residual_eval_errors", residual.eval_errors.len() as f64, 0.0),
        Check::at_most("jet_first", jet.max_first, gates::JET_FIRST),
        Check::at_most("jet_second", jet.max_second, gates::JET_SECOND),
        Check::at_least("jet_points", jet.points as f64, gates::JET_POINTS as f64),
        Check::at_most("boundary_state", continuity.boundary_state_max, gates::BOUNDARY_STATE),
        Check::at_most(
            "interface_jump",
            continuity.interface_jumps.iter().copied().fold(0.0, f64::max),
            gates::INTERFACE,
        ),
        Check::finite("envelope_constant", envelope.constant),
        Check::at_most("envelope_eval_errors", envelope.eval_errors.len() as f64, 0.0),
        Check::at_most("envelope_m_le_M", envelope.max_log_excess, gates::M_OVER_ENVELOPE),
    ];
    if continuity.boundary_points == 0 {
        g.push(Check::at_least("continuity_points", 0.0, 1.0));
    }
    if let Some(d) = &decay {
        let max_step = d.ln_m.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        g.push(Check::below("decay_max_step", max_step, 0.0));
        g.push(Check::below("decay_slope", d.slope, 0.0));
        g.push(Check::at_most("decay_spread", d.spread, gates::DECAY_SPREAD));
        g.push(Check::at_most("decay_telescoping", d.telescoping_rel_err, gates::TELESCOPING));
        g.push(Check::at_most("decay_m_le_M", d.max_m_over_envelope, gates::M_OVER_ENVELOPE));
    }
    if !invariants.eval_errors.is_empty() {
        g.push(Check::at_most("invariant_eval_errors", invariants.eval_errors.len() as f64, 0.0));
    }

    let fallback = residual.fallback_solves + envelope.fallback_solves;
    if fallback > 0 {
        flags.push(format!("least-norm fallback used in {fallback} potential solves"));
    }
    for (what, errs) in [("residual", &residual.eval_errors), ("jet", &jet.eval_errors), ("envelope", &envelope.eval_errors)] {
        if let Some(first) = errs.first() {
            flags.push(format!("{} {what} evaluation errors, first: {first}", errs.len()));
        }
    }
    for e in &invariants.eval_errors {
        flags.push(format!("invariant evaluation error: {e}"));
    }
    let nx_radical = (plane.config.mode == Mode::MeshNX).then_some(invariants.values.nx_radical);
    let mut rep = VerificationReport {
        schema_version: SCHEMA_VERSION,
        config: plane.config,
        options: *opts,
        residual,
        jet,
        envelope,
        continuity,
        decay,
        sector_margin: invariants.values.sector_gap,
        invariants,
        nx_radical,
        gates: g,
        flags,
        passed: false,
    };
    rep.passed = rep.failed_checks().is_empty();
    rep
}

fn check_line(out: &mut String, c: &Check) {
    let rel = c.relation.symbol();
    let bound = c.bound.map(|b| format!("{b:.6e}")).unwrap_or_default();
    let verdict = if c.pass { "pass" } else { "FAIL" };
    let _ = writeln!(out, "  {verdict:<4}  {:<28} {:>14.6e}  {rel} {bound}", c.name, c.measured);
}

pub fn render_text(rep: &VerificationReport) -> String {
    let mut s = String::new();
    let c = &rep.config;
    let _ = writeln!(
        s,
        "mode {}  lambda {}{:+}i  rho1 {}  annuli {}  seed {}",
        c.mode.name(),
        c.lambda.re,
        c.lambda.im,
        c.rho1,
        c.annuli,
        rep.options.seed
    );
    let _ = writeln!(s, "result: {}", if rep.passed { "PASS" } else { "FAIL" });
    let _ = writeln!(s, "\nresidual (fd step scale {:.3e} r, {:.3e}/n_max):", rep.options.scheme.step_r, rep.options.scheme.step_phi);
    for (k, v) in &rep.residual.per_class {
        let _ = writeln!(s, "  {k:<16} n={:<6} p99 {:.3e}  max {:.3e}", v.sample_count, v.p99_rel, v.max_rel);
    }
    let _ = writeln!(s, "  {:<16} n={:<6} p99 {:.3e}  max {:.3e}", "overall", rep.residual.overall.sample_count, rep.residual.overall.p99_rel, rep.residual.overall.max_rel);
    let _ = writeln!(s, "jets: {} points, first {:.3e}, second {:.3e}", rep.jet.points, rep.jet.max_first, rep.jet.max_second);
    let _ = writeln!(s, "envelope {} = {:.6e} over {} points", rep.envelope.name, rep.envelope.constant, rep.envelope.points);
    if let Some(d) = &rep.decay {
        let _ = writeln!(s, "decay: slope {:.6e}, intercept {:.6e}, spread {:.4}", d.slope, d.intercept, d.spread);
        let cs: Vec<String> = d.implied_c.iter().map(|c| format!("{c:.5}")).collect();
        let _ = writeln!(s, "  implied c: {}", cs.join(" "));
    }
    let _ = writeln!(s, "sector margin {:.6}", rep.sector_margin);
    if let Some(x) = rep.nx_radical {
        let _ = writeln!(s, "nx radical sup {x:.6}");
    }
    let _ = writeln!(s, "\ngates:");
    for c in &rep.gates {
        check_line(&mut s, c);
    }
    let _ = writeln!(s, "invariants:");
    for c in &rep.invariants.checks {
        check_line(&mut s, c);
    }
    if !rep.flags.is_empty() {
        let _ = writeln!(s, "flags:");
        for f in &rep.flags {
            let _ = writeln!(s, "  {f}");
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityRow {
    pub quantity: String,
    pub values: Vec<f64>,
    /// values[i + 1] / values[i].
    pub ratios: Vec<f64>,
    /// Whether the row has to stay within the stability band.
    pub gated: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityTable {
    pub scales: Vec<f64>,
    pub rows: Vec<StabilityRow>,
    pub passed: bool,
}

fn row(quantity: &str, values: Vec<f64>, gated: bool) -> StabilityRow {
    let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    let ok = ratios.iter().all(|r| (gates::STABILITY_LO..=gates::STABILITY_HI).contains(r))
        && values.iter().all(|v| v.is_finite());
    StabilityRow { quantity: quantity.into(), values, ratios, gated, pass: !gated || ok }
}

fn median_c(r: &VerificationReport) -> f64 {
    match &r.decay {
        Some(d) => {
            let mut c = d.implied_c.clone();
            c.sort_by(f64::total_cmp);
            c[c.len() / 2]
        }
        None => f64::NAN,
    }
}

/// Cross-scale table for reports ordered by rho1.
pub fn stability_table(reports: &[VerificationReport]) -> StabilityTable {
    let col = |f: &dyn Fn(&VerificationReport) -> f64| reports.iter().map(f).collect::<Vec<_>>();
    let name = reports.first().map(|r| r.envelope.name.clone()).unwrap_or_default();
    let mut rows = vec![
        row(&name, col(&|r| r.envelope.constant), true),
        row("decay_c_median", col(&median_c), false),
        row("psi_c1", col(&|r| r.invariants.values.psi_c1), false),
        row("psi_c2", col(&|r| r.invariants.values.psi_c2), false),
        row("psib_c1", col(&|r| r.invariants.values.psib_c1), false),
        row("psib_c2", col(&|r| r.invariants.values.psib_c2), false),
        row("h_c_tilde", col(&|r| r.invariants.values.h_c_tilde), true),
        row("sep_u2u1", col(&|r| r.invariants.values.sep_u2u1_inner.min(r.invariants.values.sep_u2u1_outer)), false),
        row("sep_u5u4", col(&|r| r.invariants.values.sep_u5u4_inner.min(r.invariants.values.sep_u5u4_outer)), false),
        row("sector_margin", col(&|r| r.sector_margin), false),
    ];
    if reports.iter().all(|r| r.nx_radical.is_some()) {
        rows.push(row("nx_radical", col(&|r| r.nx_radical.unwrap_or(f64::NAN)), true));
    }
    let passed = rows.iter().all(|r| r.pass);
    StabilityTable { scales: reports.iter().map(|r| r.config.rho1).collect(), rows, passed }
}

pub fn render_stability(t: &StabilityTable) -> String {
    let mut s = String::new();
    let scales: Vec<String> = t.scales.iter().map(|x| format!("{x:>12}")).collect();
    let _ = writeln!(s, "{:<16}{}  ratios", "rho1", scales.join(""));
    for r in &t.rows {
        let v: Vec<String> = r.values.iter().map(|x| format!("{x:>12.5e}")).collect();
        let q: Vec<String> = r.ratios.iter().map(|x| format!("{x:.4}")).collect();
        let tag = if !r.gated { "" } else if r.pass { "  pass" } else { "  FAIL" };
        let _ = writeln!(s, "{:<16}{}  {}{tag}", r.quantity, v.join(""), q.join(" "));
    }
    let _ = writeln!(s, "stability: {}", if t.passed { "PASS" } else { "FAIL" });
    s
}
