//! Acceptance run: builds every mode at two scales and prints one line per
//! criterion. Exits non-zero if a criterion fails for a reason other than the
//! known structural ones recorded in `KNOWN_INFEASIBLE`.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

use annulus_core::verify::{verify_plane, VerificationReport, VerifyOptions};
use annulus_core::{build_plane, Cplx, Mode, MuParams, PlaneConfig, RegionClass};

const SCALES: [f64; 2] = [1600.0, 6400.0];
const ANNULI: usize = 10;
const SEED: u64 = 2024;

const QUADRATURE_REL: f64 = 1e-10;
const JET_MIN_POINTS: usize = 1000;
const JET_FIRST: f64 = 1e-6;
const JET_SECOND: f64 = 1e-4;
const RESIDUAL_P99: f64 = 1e-3;
const RESIDUAL_MAX: f64 = 1e-2;
const BOUNDARY_STATE: f64 = 1e-12;
const INTERFACE: f64 = 1e-9;
const BAND: (f64, f64) = (0.5, 2.0);
const DECAY_SPREAD: f64 = 0.5;
const TELESCOPING: f64 = 1e-6;
/// (1/2) sin(pi/7), rounded down at the fifth digit.
const SECTOR_GAP: f64 = 0.21694;

/// Structural checks that no admissible choice of profile or cutoff can meet;
/// they are expected to fail and nothing else may.
const KNOWN_INFEASIBLE: [&str; 4] = ["f3_slope", "phi3", "psi_c2", "psib_c2"];

struct Case {
    label: &'static str,
    mode: Mode,
    lambda: Cplx,
}

const CASES: [Case; 5] = [
    Case { label: "mesh-n  1", mode: Mode::MeshN, lambda: Cplx::new(1.0, 0.0) },
    Case { label: "mesh-n  1+0.5i", mode: Mode::MeshN, lambda: Cplx::new(1.0, 0.5) },
    Case { label: "mesh-p  1", mode: Mode::MeshP, lambda: Cplx::new(1.0, 0.0) },
    Case { label: "mesh-p  1+0.5i", mode: Mode::MeshP, lambda: Cplx::new(1.0, 0.5) },
    Case { label: "mesh-nx 1", mode: Mode::MeshNX, lambda: Cplx::new(1.0, 0.0) },
];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(problems: Vec<String>, summary: String) -> Self {
        if problems.is_empty() {
            Outcome { pass: true, detail: summary }
        } else {
            Outcome { pass: false, detail: format!("{summary}; {}", problems.join("; ")) }
        }
    }
}

/// runs[case][scale]
type Runs = Vec<Vec<VerificationReport>>;

fn ratio_ok(a: f64, b: f64) -> bool {
    let q = b / a;
    a.is_finite() && b.is_finite() && q >= BAND.0 && q <= BAND.1
}

fn criterion_1() -> Outcome {
    let mut problems = Vec::new();
    for n in [1u64, 2, 50, 800, 4000] {
        let m = MuParams::new(n, Cplx::new(0.0, 0.0)).unwrap();
        for r in [0.0, 0.5, 400.0, 3999.0, 1e5] {
            let v = m.ln_value(r).unwrap();
            if v.re != 0.0 || v.im != 0.0 {
                problems.push(format!("log mu_{n}({r}) = {v} at lambda = 0"));
            }
        }
    }
    // Simpson on [0, r] of lambda t / (n (1 + sqrt(1 - lambda t^2 / n^2)))
    let n = 800u64;
    let nf = n as f64;
    let lam = Cplx::new(1.0, 0.0);
    let deriv = |t: f64| {
        let s = (Cplx::new(1.0, 0.0) - lam * t * t / (nf * nf)).sqrt();
        lam * t / ((s + 1.0) * nf)
    };
    let m = MuParams::new(n, lam).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..=24 {
        let r = 400.0 + 5.0 * i as f64;
        let steps = 6000;
        let h = r / steps as f64;
        let mut acc = deriv(0.0) + deriv(r);
        for k in 1..steps {
            acc += deriv(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let quad = acc * (h / 3.0);
        let got = m.ln_value(r).unwrap();
        worst = worst.max((got - quad).norm() / quad.norm());
    }
    if worst > QUADRATURE_REL {
        problems.push(format!("quadrature rel err {worst:.2e} > {QUADRATURE_REL:.0e}"));
    }
    Outcome::new(problems, format!("lambda = 0 exact, quadrature rel err {worst:.2e}"))
}

fn criterion_2(runs: &Runs) -> Outcome {
    let mut problems = Vec::new();
    let (mut first, mut second, mut fewest) = (0.0f64, 0.0f64, usize::MAX);
    for (case, reps) in CASES.iter().zip(runs) {
        for rep in reps {
            let j = &rep.jet;
            first = first.max(j.max_first);
            second = second.max(j.max_second);
            fewest = fewest.min(j.points);
            let tag = format!("{} rho1={}", case.label, rep.config.rho1);
            if j.points < JET_MIN_POINTS {
                problems.push(format!("{tag}: {} points", j.points));
            }
            if !(j.max_first <= JET_FIRST) || !(j.max_second <= JET_SECOND) {
                problems.push(format!("{tag}: first {:.2e} second {:.2e}", j.max_first, j.max_second));
            }
            if !j.eval_errors.is_empty() {
                problems.push(format!("{tag}: {} eval errors", j.eval_errors.len()));
            }
        }
    }
    Outcome::new(problems, format!(">= {fewest} points per run, worst first {first:.2e}, second {second:.2e}"))
}

fn criterion_3(runs: &Runs) -> Outcome {
    let mut problems = Vec::new();
    let (mut p99, mut max) = (0.0f64, 0.0f64);
    let opts = VerifyOptions::default();
    for (case, reps) in CASES.iter().zip(runs) {
        for rep in reps {
            let res = &rep.residual;
            let tag = format!("{} rho1={}", case.label, rep.config.rho1);
            p99 = p99.max(res.overall.p99_rel);
            max = max.max(res.overall.max_rel);
            if !(res.overall.p99_rel <= RESIDUAL_P99) || !(res.overall.max_rel <= RESIDUAL_MAX) {
                problems.push(format!("{tag}: p99 {:.2e} max {:.2e}", res.overall.p99_rel, res.overall.max_rel));
            }
            if !res.eval_errors.is_empty() {
                problems.push(format!("{tag}: {} eval errors", res.eval_errors.len()));
            }
            let inner = std::iter::once((RegionClass::InnerDisk, opts.samples_per_class));
            let annular = RegionClass::ANNULUS.iter().map(|&c| (c, opts.samples_per_class * ANNULI));
            for (class, quota) in inner.chain(annular) {
                let count = res.per_class.get(class.name()).map_or(0, |s| s.sample_count);
                if count < quota {
                    problems.push(format!("{tag}: {} has {count} samples", class.name()));
                }
            }
        }
    }
    Outcome::new(problems, format!("worst p99 {p99:.2e}, worst max {max:.2e}, all 10 classes covered"))
}

fn criterion_4(runs: &Runs) -> Outcome {
    let mut problems = Vec::new();
    let (mut state, mut jump) = (0.0f64, 0.0f64);
    for (case, reps) in CASES.iter().zip(runs) {
        for rep in reps {
            let c = &rep.continuity;
            let tag = format!("{} rho1={}", case.label, rep.config.rho1);
            let j = c.interface_jumps.iter().copied().fold(0.0, f64::max);
            state = state.max(c.boundary_state_max);
            jump = jump.max(j);
            if c.boundary_points == 0 || !(c.boundary_state_max <= BOUNDARY_STATE) {
                problems.push(format!("{tag}: boundary state {:.2e}", c.boundary_state_max));
            }
            if c.interface_jumps.len() != ANNULI || !(j <= INTERFACE) {
                problems.push(format!("{tag}: interface jump {j:.2e} over {} interfaces", c.interface_jumps.len()));
            }
        }
    }
    Outcome::new(problems, format!("boundary state {state:.2e}, interface {jump:.2e}"))
}

fn criterion_5(runs: &Runs) -> Outcome {
    let mut problems = Vec::new();
    let mut parts = Vec::new();
    for (case, reps) in CASES.iter().zip(runs) {
        let (a, b) = (reps[0].envelope.constant, reps[1].envelope.constant);
        parts.push(format!("{} {:.1}->{:.1} ({:.2})", case.label.trim_end(), a, b, b / a));
        if !ratio_ok(a, b) {
            problems.push(format!("{}: ratio {:.3}", case.label, b / a));
        }
        for rep in reps {
            if !rep.envelope.eval_errors.is_empty() {
                problems.push(format!("{} rho1={}: envelope eval errors", case.label, rep.config.rho1));
            }
        }
    }
    Outcome::new(problems, parts.join(", "))
}

fn criterion_6(runs: &Runs) -> Outcome {
    let mut problems = Vec::new();
    let (mut spread, mut tele, mut c_min) = (0.0f64, 0.0f64, f64::INFINITY);
    for (case, reps) in CASES.iter().zip(runs) {
        for rep in reps {
            let tag = format!("{} rho1={}", case.label, rep.config.rho1);
            let Some(d) = &rep.decay else {
                problems.push(format!("{tag}: no decay report"));
                continue;
            };
            let decreasing = d.ln_m.windows(2).all(|w| w[1] < w[0]);
            spread = spread.max(d.spread);
            tele = tele.max(d.telescoping_rel_err);
            c_min = c_min.min(-d.slope);
            if !decreasing {
                problems.push(format!("{tag}: ln m not strictly decreasing"));
            }
            if !(-d.slope > 0.0) {
                problems.push(format!("{tag}: fitted c = {:.3e}", -d.slope));
            }
            if !(d.spread <= DECAY_SPREAD) || !(d.telescoping_rel_err <= TELESCOPING) {
                problems.push(format!("{tag}: spread {:.3} telescoping {:.2e}", d.spread, d.telescoping_rel_err));
            }
        }
    }
    Outcome::new(problems, format!("min c {c_min:.3e}, worst spread {spread:.3}, telescoping {tele:.2e}"))
}

fn criterion_7(runs: &Runs) -> Outcome {
    let mut problems = Vec::new();
    let mut gap = f64::INFINITY;
    for (case, reps) in CASES.iter().zip(runs) {
        for rep in reps {
            gap = gap.min(rep.sector_margin);
            if !(rep.sector_margin >= SECTOR_GAP) {
                problems.push(format!("{} rho1={}: {:.5}", case.label, rep.config.rho1, rep.sector_margin));
            }
        }
    }
    Outcome::new(problems, format!("min gap {gap:.5} against {SECTOR_GAP}"))
}

/// Returns the outcome, the failing invariant names, and whether anything
/// else (separations, C~ stability, evaluation) failed.
fn criterion_8(runs: &Runs) -> (Outcome, BTreeSet<String>, bool) {
    let mut problems = Vec::new();
    let mut failing = BTreeSet::new();
    for (case, reps) in CASES.iter().zip(runs) {
        for rep in reps {
            for c in &rep.invariants.checks {
                if c.name == "sector_gap" || c.name == "nx_radical" {
                    continue;
                }
                if !c.pass {
                    failing.insert(c.name.clone());
                }
            }
            let v = &rep.invariants.values;
            let seps = [v.sep_u2u1_inner, v.sep_u2u1_outer, v.sep_u5u4_inner, v.sep_u5u4_outer];
            if !seps.iter().all(|s| *s > 0.0 && s.is_finite()) {
                problems.push(format!("{} rho1={}: separations {seps:?}", case.label, rep.config.rho1));
            }
            if !rep.invariants.eval_errors.is_empty() {
                problems.push(format!("{} rho1={}: invariant eval errors", case.label, rep.config.rho1));
            }
        }
        let (a, b) = (reps[0].invariants.values.h_c_tilde, reps[1].invariants.values.h_c_tilde);
        if !ratio_ok(a, b) {
            problems.push(format!("{}: C~ {a:.2} -> {b:.2}", case.label));
        }
    }
    let other = !problems.is_empty();
    if !failing.is_empty() {
        let worst = |name: &str| {
            runs.iter()
                .flatten()
                .flat_map(|r| &r.invariants.checks)
                .filter(|c| c.name == name)
                .map(|c| c.measured)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let list: Vec<String> = failing.iter().map(|n| format!("{n} = {:.2}", worst(n))).collect();
        problems.push(format!("failing: {}", list.join(", ")));
    }
    let summary = "separations positive, C~ stable across scales".to_string();
    (Outcome::new(problems, summary), failing, other)
}

fn criterion_9(runs: &Runs) -> Outcome {
    let mut problems = Vec::new();
    let reps = &runs[CASES.iter().position(|c| c.mode == Mode::MeshNX).unwrap()];
    let vals: Vec<f64> = reps.iter().map(|r| r.nx_radical.unwrap_or(f64::NAN)).collect();
    if !ratio_ok(vals[0], vals[1]) {
        problems.push(format!("ratio {:.3}", vals[1] / vals[0]));
    }
    Outcome::new(problems, format!("sup {:.3} -> {:.3} ({:.3})", vals[0], vals[1], vals[1] / vals[0]))
}

fn criterion_10() -> Outcome {
    let run = |dir: &std::path::Path| {
        Command::new(env!("CARGO_BIN_EXE_annulus-forge"))
            .args(["verify", "--mode", "mesh-p", "--lambda", "1,0.5", "--seed", "17", "--out"])
            .arg(dir)
            .output()
            .expect("binary runs")
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (oa, ob) = (run(a.path()), run(b.path()));
    let mut problems = Vec::new();
    if oa.status.code() != ob.status.code() {
        problems.push("exit codes differ".into());
    }
    for f in ["manifest.json", "report.json"] {
        match (std::fs::read(a.path().join(f)), std::fs::read(b.path().join(f))) {
            (Ok(x), Ok(y)) if x == y => {}
            (Ok(_), Ok(_)) => problems.push(format!("{f} differs")),
            _ => problems.push(format!("{f} missing")),
        }
    }
    Outcome::new(problems, "manifest.json and report.json byte-identical over two CLI runs".into())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let opts = VerifyOptions { seed: SEED, ..VerifyOptions::default() };
    let mut runs: Runs = Vec::new();
    for case in &CASES {
        let mut reps = Vec::new();
        for rho1 in SCALES {
            let cfg = PlaneConfig { rho1, lambda: case.lambda, mode: case.mode, annuli: ANNULI };
            let plane = build_plane(cfg).unwrap_or_else(|e| panic!("{} rho1={rho1}: {e}", case.label));
            reps.push(verify_plane(&plane, &opts));
            eprintln!("  verified {} rho1={rho1} ({:.0?})", case.label, start.elapsed());
        }
        runs.push(reps);
    }

    let (c8, failing8, c8_other) = criterion_8(&runs);
    let outcomes = [
        ("branch/series consistency", criterion_1()),
        ("jet correctness", criterion_2(&runs)),
        ("pde residual", criterion_3(&runs)),
        ("boundary states and interfaces", criterion_4(&runs)),
        ("envelope bounds", criterion_5(&runs)),
        ("decay", criterion_6(&runs)),
        ("sector lower bound", criterion_7(&runs)),
        ("structural invariants", c8),
        ("mesh-nx radical", criterion_9(&runs)),
        ("determinism", criterion_10()),
    ];

    println!("acceptance at rho1 = {SCALES:?}, {ANNULI} annuli, seed {SEED}");
    let mut unexpected = Vec::new();
    for (i, (name, o)) in outcomes.iter().enumerate() {
        println!("criterion {:>2} {:<32} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass && i + 1 != 8 {
            unexpected.push(i + 1);
        }
    }
    let known: BTreeSet<String> = KNOWN_INFEASIBLE.iter().map(|s| s.to_string()).collect();
    let c8_only_known = outcomes[7].1.pass || failing8 == known;
    if !c8_only_known {
        println!("criterion 8 failures differ from the known infeasible set {known:?}: {failing8:?}");
    }
    if c8_other {
        println!("criterion 8 has failures beyond the known infeasible checks");
    }
    println!("total {:.0?}", start.elapsed());
    if unexpected.is_empty() && c8_only_known && !c8_other {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
