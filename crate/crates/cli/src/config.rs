//! Run configuration: a flat TOML file overridden by command-line flags.

use std::path::{Path, PathBuf};

use annulus_core::{Cplx, Error, Mode, PlaneConfig, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub lambda: Cplx,
    pub rho1: f64,
    pub annuli: usize,
    pub seed: u64,
    /// Residual points per region class per annulus.
    pub samples: usize,
    pub fd_step_scale: f64,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::MeshN,
            lambda: Cplx::new(1.0, 0.0),
            rho1: 1600.0,
            annuli: 10,
            seed: 0,
            samples: 100,
            fd_step_scale: 1.0,
            out: PathBuf::from("."),
        }
    }
}

/// Values given on the command line; `None` keeps the file or default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<String>,
    pub lambda: Option<String>,
    pub rho1: Option<f64>,
    pub annuli: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub fd_step_scale: Option<f64>,
    pub out: Option<PathBuf>,
}

/// "re,im" or a bare real.
pub fn parse_lambda(s: &str) -> Result<Cplx> {
    let bad = || Error::Config(format!("lambda '{s}' is not 're,im'"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    let z = match parts.as_slice() {
        [re] => Cplx::new(num(re)?, 0.0),
        [re, im] => Cplx::new(num(re)?, num(im)?),
        _ => return Err(bad()),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(bad());
    }
    Ok(z)
}

fn number(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Integer(i) => Ok(*i as f64),
        toml::Value::Float(f) => Ok(*f),
        _ => Err(Error::Config(format!("{key} must be a number"))),
    }
}

fn integer(key: &str, v: &toml::Value) -> Result<u64> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        _ => Err(Error::Config(format!("{key} must be a non-negative integer"))),
    }
}

fn string<'a>(key: &str, v: &'a toml::Value) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::Config(format!("{key} must be a string")))
}

/// Reads the flat key/value file into overrides.
pub fn read_file(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let table: toml::Table =
        text.parse().map_err(|e: toml::de::Error| Error::Config(e.message().replace('\n', " ")))?;
    let mut o = Overrides::default();
    for (key, v) in &table {
        match key.as_str() {
            "mode" => o.mode = Some(string(key, v)?.to_string()),
            "lambda" => {
                o.lambda = Some(match v {
                    toml::Value::String(s) => s.clone(),
                    _ => number(key, v)?.to_string(),
                })
            }
            "rho1" => o.rho1 = Some(number(key, v)?),
            "annuli" => o.annuli = Some(integer(key, v)? as usize),
            "seed" => o.seed = Some(integer(key, v)?),
            "samples" => o.samples = Some(integer(key, v)? as usize),
            "fd_step_scale" => o.fd_step_scale = Some(number(key, v)?),
            "out" => o.out = Some(PathBuf::from(string(key, v)?)),
            other => return Err(Error::Config(format!("unknown key '{other}' in config file"))),
        }
    }
    Ok(o)
}

impl RunConfig {
    /// Defaults, then the file, then the flags.
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self> {
        let mut c = RunConfig::default();
        if let Some(p) = file {
            c.apply(&read_file(p)?)?;
        }
        c.apply(flags)?;
        c.validate()?;
        Ok(c)
    }

    fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(m) = &o.mode {
            self.mode = Mode::parse(m)?;
        }
        if let Some(l) = &o.lambda {
            self.lambda = parse_lambda(l)?;
        }
        self.rho1 = o.rho1.unwrap_or(self.rho1);
        self.annuli = o.annuli.unwrap_or(self.annuli);
        self.seed = o.seed.unwrap_or(self.seed);
        self.samples = o.samples.unwrap_or(self.samples);
        self.fd_step_scale = o.fd_step_scale.unwrap_or(self.fd_step_scale);
        if let Some(p) = &o.out {
            self.out = p.clone();
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        if !(self.fd_step_scale > 0.0) || !self.fd_step_scale.is_finite() {
            return Err(Error::Config("fd-step-scale must be a positive number".into()));
        }
        self.plane().validate()
    }

    pub fn plane(&self) -> PlaneConfig {
        PlaneConfig { rho1: self.rho1, lambda: self.lambda, mode: self.mode, annuli: self.annuli }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_forms() {
        assert_eq!(parse_lambda("1,0.5").unwrap(), Cplx::new(1.0, 0.5));
        assert_eq!(parse_lambda(" 2 ").unwrap(), Cplx::new(2.0, 0.0));
        assert!(parse_lambda("1,2,3").is_err());
        assert!(parse_lambda("a,b").is_err());
        assert!(parse_lambda("nan").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("forge-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let f = dir.join("run.toml");
        std::fs::write(&f, "mode = \"mesh-p\"\nlambda = \"1,0.5\"\nrho1 = 900\nannuli = 4\n").unwrap();
        let flags = Overrides { annuli: Some(6), ..Default::default() };
        let c = RunConfig::resolve(Some(&f), &flags).unwrap();
        assert_eq!((c.mode, c.rho1, c.annuli), (Mode::MeshP, 900.0, 6));
        assert_eq!(c.lambda, Cplx::new(1.0, 0.5));
        std::fs::write(&f, "colour = 3\n").unwrap();
        assert!(matches!(RunConfig::resolve(Some(&f), &Overrides::default()), Err(Error::Config(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let bad = |o: Overrides| RunConfig::resolve(None, &o).unwrap_err();
        assert!(matches!(bad(Overrides { samples: Some(0), ..Default::default() }), Error::Config(_)));
        let nx = Overrides { mode: Some("mesh-nx".into()), lambda: Some("1,0.5".into()), ..Default::default() };
        assert!(matches!(bad(nx), Error::Config(_)));
        assert!(matches!(bad(Overrides { fd_step_scale: Some(-1.0), ..Default::default() }), Error::Config(_)));
    }
}
