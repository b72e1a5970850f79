//! JSON distribution specs and the input digests gathered while loading them.

use std::path::{Path, PathBuf};

use betascale_core::distributions::{Above, Below, Interpolation, TailHint};
use betascale_core::{Distribution, QuadratureConfig, ScalingParams, TabulatedCdf};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistSpec {
    Uniform { a: f64, b: f64 },
    Beta { a: f64, b: f64 },
    Gamma { shape: f64, rate: f64 },
    Exponential { rate: f64 },
    Pareto { gamma: f64, xmin: f64 },
    Rayleigh { sigma: f64 },
    /// `m` defaults to the value that makes the law a proper distribution.
    Kotz { m: Option<f64>, n: f64, r: f64, theta: f64 },
    Pointmass { c: f64 },
    Tabulated {
        path: PathBuf,
        #[serde(default)]
        interpolation: InterpSpec,
        #[serde(default)]
        below: EdgeSpec,
        #[serde(default)]
        above: EdgeSpec,
        tail: Option<TailSpec>,
    },
    /// The law of `B Y`, `B ~ beta(alpha, beta)`.
    Scaled { base: Box<DistSpec>, alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpSpec {
    #[default]
    Cubic,
    Linear,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeSpec {
    /// cdf 0 below the grid, 1 above it.
    #[default]
    Jump,
    Exponential,
    Power,
    LinearTo(f64),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSpec {
    Gumbel,
    Frechet,
    Endpoint(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Loads input files and remembers their digests.
#[derive(Debug, Default)]
pub struct Inputs {
    pub digests: Vec<InputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let entry = InputDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) };
        if !self.digests.contains(&entry) {
            self.digests.push(entry);
        }
        Ok(bytes)
    }

    pub fn distribution(&mut self, path: &Path) -> CliResult<Distribution> {
        let bytes = self.read(path)?;
        let spec: DistSpec = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        self.build(&spec, base)
    }

    fn build(&mut self, spec: &DistSpec, base: &Path) -> CliResult<Distribution> {
        let d = match spec {
            DistSpec::Uniform { a, b } => Distribution::uniform(*a, *b)?,
            DistSpec::Beta { a, b } => Distribution::beta(*a, *b)?,
            DistSpec::Gamma { shape, rate } => Distribution::gamma(*shape, *rate)?,
            DistSpec::Exponential { rate } => Distribution::exponential(*rate)?,
            DistSpec::Pareto { gamma, xmin } => Distribution::pareto(*gamma, *xmin)?,
            DistSpec::Rayleigh { sigma } => Distribution::rayleigh(*sigma)?,
            DistSpec::Kotz { m: Some(m), n, r, theta } => Distribution::kotz(*m, *n, *r, *theta)?,
            DistSpec::Kotz { m: None, n, r, theta } => Distribution::kotz_normalized(*n, *r, *theta)?,
            DistSpec::Pointmass { c } => Distribution::point_mass(*c)?,
            DistSpec::Tabulated { path, interpolation, below, above, tail } => {
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                let bytes = self.read(&full)?;
                let (grid, values) = read_cdf_table(&bytes).map_err(|m| CliError::Input(format!("{}: {m}", full.display())))?;
                let interp = match interpolation {
                    InterpSpec::Cubic => Interpolation::MonotoneCubic,
                    InterpSpec::Linear => Interpolation::Linear,
                };
                let below = match below {
                    EdgeSpec::Jump => Below::Zero,
                    EdgeSpec::LinearTo(l) => Below::LinearTo(*l),
                    _ => return Err(CliError::Input("\"below\" must be \"jump\" or {\"linear_to\": x}".into())),
                };
                let above = match above {
                    EdgeSpec::Jump => Above::One,
                    EdgeSpec::Exponential => Above::ExponentialTail,
                    EdgeSpec::Power => Above::PowerTail,
                    EdgeSpec::LinearTo(r) => Above::LinearTo(*r),
                };
                let mut t = TabulatedCdf::with_options(grid, values, interp, below, above)?;
                if let Some(h) = tail {
                    t = t.with_hint(match h {
                        TailSpec::Gumbel => TailHint::Gumbel,
                        TailSpec::Frechet => TailHint::Frechet,
                        TailSpec::Endpoint(r) => TailHint::Endpoint(*r),
                    });
                }
                Distribution::tabulated(t)
            }
            DistSpec::Scaled { base: inner, alpha, beta } => {
                let b = self.build(inner, base)?;
                Distribution::scaled_with(b, ScalingParams::new(*alpha, *beta)?, QuadratureConfig::default())?
            }
        };
        Ok(d)
    }
}

#[derive(Deserialize)]
struct CdfRow {
    x: f64,
    cdf: f64,
}

fn read_cdf_table(bytes: &[u8]) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(bytes);
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for row in rdr.deserialize::<CdfRow>() {
        let row = row.map_err(|e| e.to_string())?;
        grid.push(row.x);
        values.push(row.cdf);
    }
    Ok((grid, values))
}

#[derive(Deserialize)]
struct PairRow {
    u: f64,
    v: f64,
}

/// `(u, v)` columns of a sample file.
pub fn read_pairs(bytes: &[u8]) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(bytes);
    let mut u = Vec::new();
    let mut v = Vec::new();
    for row in rdr.deserialize::<PairRow>() {
        let row = row.map_err(|e| e.to_string())?;
        u.push(row.u);
        v.push(row.v);
    }
    Ok((u, v))
}
