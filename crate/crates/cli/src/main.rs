mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use annulus_core::verify::{
    render_stability, render_text, stability_table, verify_plane, EnvelopeGrid, FdScheme, VerificationReport,
    VerifyOptions,
};
use annulus_core::{build_plane, Error, PlaneSolution};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "annulus-forge", version, about = "Build and check decaying solutions on annulus ladders")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the ladder and write manifest.json.
    Build(Common),
    /// Build, run every check, write report.json and report.txt.
    Verify(Common),
    /// Write u, the potential, or the envelope along a path as CSV.
    Sample(SampleArgs),
    /// Verify at several rho1 values and tabulate cross-scale ratios.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// mesh-n, mesh-p or mesh-nx.
    #[arg(long)]
    mode: Option<String>,
    /// "re,im".
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long)]
    rho1: Option<f64>,
    #[arg(long)]
    annuli: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Residual points per region class per annulus.
    #[arg(long)]
    samples: Option<usize>,
    /// Multiplies both finite-difference steps.
    #[arg(long, allow_hyphen_values = true)]
    fd_step_scale: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat TOML file with the same keys (underscored); flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    U,
    Potential,
    Envelope,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathKind {
    /// phi = phi0, r from r-min to r-max.
    Ray,
    /// Same as ray; the envelope ignores phi.
    Radial,
    /// r fixed, phi over [0, 2 pi).
    Circle,
    /// points radii times angles.
    Grid,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "u")]
    what: What,
    #[arg(long, value_enum, default_value = "ray")]
    path: PathKind,
    /// Defaults to rho1 (or half of it for u and the potential).
    #[arg(long)]
    r_min: Option<f64>,
    /// Defaults to the outer radius of the ladder.
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi0: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, default_value_t = 64)]
    angles: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated rho1 values, at least two.
    #[arg(long, default_value = "1600,6400")]
    scales: String,
}

enum Failure {
    Lib(Error),
    Io(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::OutOfDomain(_) => 4,
        Error::Domain(_) | Error::Index(_) | Error::SingularSystem(_) | Error::Eval(_) => 3,
    }
}

fn resolve(c: &Common) -> Result<RunConfig, Failure> {
    let flags = Overrides {
        mode: c.mode.clone(),
        lambda: c.lambda.clone(),
        rho1: c.rho1,
        annuli: c.annuli,
        seed: c.seed,
        samples: c.samples,
        fd_step_scale: c.fd_step_scale,
        out: c.out.clone(),
    };
    Ok(RunConfig::resolve(c.config.as_deref(), &flags)?)
}

fn options(cfg: &RunConfig) -> VerifyOptions {
    VerifyOptions {
        scheme: FdScheme::default().scaled(cfg.fd_step_scale),
        samples_per_class: cfg.samples,
        seed: cfg.seed,
        envelope: EnvelopeGrid::default(),
    }
}

fn build(cfg: &RunConfig) -> Result<PlaneSolution, Failure> {
    let plane = build_plane(cfg.plane())?;
    output::write(&cfg.out, "manifest.json", &output::json(&output::manifest(&plane)))?;
    Ok(plane)
}

fn verify(cfg: &RunConfig) -> Result<VerificationReport, Failure> {
    let plane = build(cfg)?;
    let rep = verify_plane(&plane, &options(cfg));
    output::write(&cfg.out, "report.json", &output::json(&rep))?;
    output::write(&cfg.out, "report.txt", &render_text(&rep))?;
    Ok(rep)
}

fn sample(args: &SampleArgs) -> Result<(), Failure> {
    let cfg = resolve(&args.common)?;
    if args.points == 0 || args.angles == 0 {
        return Err(Error::Config("points and angles must be >= 1".into()).into());
    }
    let plane = build_plane(cfg.plane())?;
    let outer = plane.outer_radius();
    let default_lo = match args.what {
        What::Envelope => cfg.rho1,
        _ => 0.5 * cfg.rho1,
    };
    let lo = args.r_min.unwrap_or(default_lo);
    let hi = args.r_max.unwrap_or(outer);
    if !(lo > 0.0) || !(hi >= lo) || hi > outer {
        return Err(Error::OutOfDomain(format!("radial range [{lo}, {hi}] not inside (0, {outer}]")).into());
    }
    let radii: Vec<f64> = match (args.path, args.points) {
        (PathKind::Circle, _) | (_, 1) => vec![lo],
        (_, m) => (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect(),
    };
    let tau = std::f64::consts::TAU;
    let points: Vec<(f64, f64)> = match args.path {
        PathKind::Ray | PathKind::Radial => radii.iter().map(|&r| (r, args.phi0)).collect(),
        PathKind::Circle => (0..args.points).map(|i| (lo, tau * i as f64 / args.points as f64)).collect(),
        PathKind::Grid => radii
            .iter()
            .flat_map(|&r| (0..args.angles).map(move |q| (r, tau * q as f64 / args.angles as f64)))
            .collect(),
    };
    let (name, body) = match args.what {
        What::U => ("u.csv", output::u_csv(&plane, &points)?),
        What::Potential => ("potential.csv", output::potential_csv(&plane, &points)?),
        What::Envelope => ("envelope.csv", output::envelope_csv(&plane, &radii)?),
    };
    output::write(&cfg.out, name, &body)?;
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<bool, Failure> {
    let base = resolve(&args.common)?;
    let mut scales = Vec::new();
    for t in args.scales.split(',') {
        let v: f64 = t.trim().parse().map_err(|_| Error::Config(format!("bad scale '{t}'")))?;
        scales.push(v);
    }
    if scales.len() < 2 {
        return Err(Error::Config("sweep needs at least two scales".into()).into());
    }
    scales.sort_by(f64::total_cmp);
    let mut reports = Vec::new();
    for &rho1 in &scales {
        let cfg = RunConfig { rho1, out: base.out.join(format!("rho1_{rho1}")), ..base.clone() };
        cfg.validate()?;
        reports.push(verify(&cfg)?);
    }
    let table = stability_table(&reports);
    output::write(&base.out, "stability.json", &output::json(&table))?;
    output::write(&base.out, "stability.txt", &render_stability(&table))?;
    Ok(table.passed && reports.iter().all(|r| r.passed))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Command::Build(c) => {
            build(&resolve(&c)?)?;
        }
        Command::Verify(c) => {
            if !verify(&resolve(&c)?)?.passed {
                return Err(Failure::Checks);
            }
        }
        Command::Sample(a) => sample(&a)?,
        Command::Sweep(a) => {
            if !sweep(&a)? {
                return Err(Failure::Checks);
            }
        }
    }
    Ok(())
}

fn init_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("ANNULUS_FORGE_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("ANNULUS_FORGE_THREADS='{v}' is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Io(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: config: {first}");
            return ExitCode::from(2);
        }
    };
    match init_threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => {
            eprintln!("error: check: one or more checks failed, see report.txt");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: io: {}", m.replace('\n', " "));
            ExitCode::from(5)
        }
    }
}
