use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use carleman_core::{LogGrid, Side};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Resolvent,
    Density,
    Evolve,
    Scatter,
    Count,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Resolvent => "resolvent",
            Command::Density => "density",
            Command::Evolve => "evolve",
            Command::Scatter => "scatter",
            Command::Count => "count",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self) -> carleman_core::Result<LogGrid> {
        LogGrid::new(self.x_min, self.x_max, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub family: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Decay exponent for the weighted conditions and the eigenvalue bound.
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl KernelSpec {
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(2.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub cond_cap: Option<f64>,
    pub fit_tol: Option<f64>,
    pub lambda_min: Option<f64>,
    pub support_tol: Option<f64>,
    pub clip: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideSpec {
    Plus,
    Minus,
}

impl From<SideSpec> for Side {
    fn from(s: SideSpec) -> Side {
        match s {
            SideSpec::Plus => Side::Plus,
            SideSpec::Minus => Side::Minus,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Second kernel argument for `resolvent` and `density`.
    pub s: Option<f64>,
    /// Imaginary part of the spectral point for `resolvent`.
    pub eps: Option<f64>,
    /// Side of the cut for boundary values.
    pub side: Option<SideSpec>,
    /// Emit every `stride`-th grid node.
    pub stride: Option<usize>,
    /// Mellin-side support of the `evolve` initial state, as `[lo, hi]` bump intervals.
    pub state: Option<Vec<[f64; 2]>>,
    /// Cross-check `count` by direct diagonalization.
    pub direct: Option<bool>,
    pub direct_grid: Option<GridSpec>,
    /// Report the a-priori eigenvalue bound in `count`.
    pub bound: Option<bool>,
    /// Solve `scatter` on the `-i0` side as well and report the plane-wave fits.
    pub fits: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub sweep: Vec<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub options: Options,
    #[serde(default)]
    pub output: OutputSpec,
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            CliError::Config { field, message: e.inner().to_string() }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }
}
