//! Run configuration shared by the flag parser and JSON sweep files.

use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use chordnoise::channels::{line_points, make_depolarizing, make_gaussian, make_phase_damping_line, DiagonalChordChannel};
use chordnoise::dynamics::{perturbed_cat, quantize_linear_map, LinearMapSpec, UnitaryMap};
use chordnoise::states::{cat_state, coherent_state, density_from_pure, DensityMatrix};
use chordnoise::TorusGeometry;
use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Depolarizing,
    PdcLine,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    #[default]
    Cat,
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Line coefficients `n1,n2,n3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSpec(pub [i64; 3]);

impl FromStr for LineSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<i64> = s
            .split(',')
            .map(|p| p.trim().parse::<i64>().map_err(|e| format!("'{p}': {e}")))
            .collect::<Result<_, _>>()?;
        match parts.as_slice() {
            [a, b, c] => Ok(LineSpec([*a, *b, *c])),
            _ => Err(format!("expected three integers n1,n2,n3, got '{s}'")),
        }
    }
}

/// Phase-space point `q,p` in unit-torus coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Centre(pub [f64; 2]);

impl FromStr for Centre {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
            .collect::<Result<_, _>>()?;
        match parts.as_slice() {
            [q, p] if q.is_finite() && p.is_finite() => Ok(Centre([*q, *p])),
            _ => Err(format!("expected two numbers q,p, got '{s}'")),
        }
    }
}

fn default_c1() -> Centre {
    Centre([0.4, 0.25])
}

fn default_c2() -> Option<Centre> {
    Some(Centre([0.6, 0.75]))
}

fn default_steps() -> usize {
    1
}

fn default_stability_count() -> usize {
    20
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ChannelArgs {
    /// Hilbert-space dimension N.
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub family: Family,
    /// Noise strength in [0, 1]; required except for gaussian (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Gaussian width in torus units.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Line coefficients for pdc-line: n1,n2,n3 with n1·p ≡ n2·q + n3 (mod N).
    #[arg(long, allow_hyphen_values = true)]
    pub line: Option<LineSpec>,
}

impl ChannelArgs {
    pub fn geometry(&self) -> Result<TorusGeometry> {
        TorusGeometry::new(self.n).map_err(|e| anyhow::anyhow!("--n: {e}"))
    }

    pub fn build(&self) -> Result<DiagonalChordChannel> {
        let geom = self.geometry()?;
        if let Some(eps) = self.epsilon {
            if !(0.0..=1.0).contains(&eps) {
                bail!("--epsilon: must lie in [0, 1], got {eps}");
            }
        }
        let require_eps = || self.epsilon.context("--epsilon is required for this family");
        match self.family {
            Family::Depolarizing => {
                self.reject_sigma()?;
                self.reject_line()?;
                Ok(make_depolarizing(&geom, require_eps()?)?)
            }
            Family::PdcLine => {
                self.reject_sigma()?;
                let LineSpec([n1, n2, n3]) = self.line.context("--line is required for pdc-line")?;
                let line = line_points(&geom, n1, n2, n3).map_err(|e| anyhow::anyhow!("--line: {e}"))?;
                Ok(make_phase_damping_line(&geom, &line, require_eps()?)?)
            }
            Family::Gaussian => {
                self.reject_line()?;
                let sigma = self.sigma.context("--sigma is required for gaussian")?;
                let ch = make_gaussian(&geom, sigma).map_err(|e| anyhow::anyhow!("--sigma: {e}"))?;
                match self.epsilon {
                    Some(eps) => Ok(ch.with_epsilon(eps)?),
                    None => Ok(ch),
                }
            }
        }
    }

    fn reject_sigma(&self) -> Result<()> {
        if self.sigma.is_some() {
            bail!("--sigma: only applies to the gaussian family");
        }
        Ok(())
    }

    fn reject_line(&self) -> Result<()> {
        if self.line.is_some() {
            bail!("--line: only applies to the pdc-line family");
        }
        Ok(())
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct StateArgs {
    /// First packet centre q,p.
    #[arg(long, default_value = "0.4,0.25", allow_hyphen_values = true)]
    #[serde(default = "default_c1")]
    pub c1: Centre,
    /// Second packet centre q,p.
    #[arg(long, default_value = "0.6,0.75", conflicts_with = "coherent", allow_hyphen_values = true)]
    #[serde(default = "default_c2")]
    pub c2: Option<Centre>,
    /// Use a single coherent state at --c1 instead of the cat superposition.
    #[arg(long)]
    #[serde(default)]
    pub coherent: bool,
}

impl StateArgs {
    pub fn build(&self, geom: &TorusGeometry) -> Result<DensityMatrix> {
        let Centre([q1, p1]) = self.c1;
        let psi = match (self.coherent, self.c2) {
            (false, Some(Centre([q2, p2]))) => cat_state(geom, (q1, p1), (q2, p2)),
            _ => coherent_state(geom, q1, p1),
        };
        Ok(density_from_pure(&psi)?)
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct MapArgs {
    #[arg(long, value_enum, default_value = "cat")]
    #[serde(default)]
    pub map: MapKind,
    /// Kick strength of the cosine position kick applied before the linear map.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    #[serde(default)]
    pub k: f64,
}

impl MapArgs {
    pub fn build(&self, geom: &TorusGeometry) -> Result<UnitaryMap> {
        if !self.k.is_finite() {
            bail!("--k: must be finite");
        }
        let map = match self.map {
            MapKind::Cat => perturbed_cat(geom, self.k),
            MapKind::Identity => quantize_linear_map(geom, LinearMapSpec::identity())
                .and_then(|id| id.compose(&chordnoise::dynamics::nonlinear_kick(geom, self.k))),
        };
        map.map_err(|e| anyhow::anyhow!("--map: {e}"))
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    #[serde(default)]
    pub format: Format,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ChannelSpectrumCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct EvolveCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
    /// Number of channel applications.
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct WignerCmd {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct PropagatorCmd {
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub map: MapArgs,
    /// Truncation coefficient: keep chords with |μ|, |ν| within a/(2πσ).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Number of leading eigenvalues to write (default: all).
    #[arg(long)]
    pub count: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct StabilityCmd {
    /// Spectrum file from propagator-spectrum (csv or json).
    pub left: PathBuf,
    pub right: PathBuf,
    #[arg(long, default_value_t = 20)]
    #[serde(default = "default_stability_count")]
    pub count: usize,
    /// Exit with failure when the deviation exceeds this value.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SweepCmd {
    /// JSON file holding an array of runs, each tagged by "command".
    pub config: PathBuf,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Channel eigenvalues Σ(λ) on every chord: q, p, re, im.
    ChannelSpectrum(ChannelSpectrumCmd),
    /// Apply a channel to a packet state; Wigner grids before and after.
    Evolve(EvolveCmd),
    /// Wigner function of a packet state on the 2N × 2N grid.
    Wigner(WignerCmd),
    /// Leading spectrum of the noisy propagator of the (perturbed) cat map.
    PropagatorSpectrum(PropagatorCmd),
    /// Max pairwise deviation between the leading eigenvalues of two spectrum files.
    Stability(StabilityCmd),
    /// Run every configuration listed in a JSON file.
    #[serde(skip)]
    Sweep(SweepCmd),
}
