//! TOML run configuration.
//!
//! ```toml
//! [problem]
//! hamiltonian = "h2_sto3g_0p74"   # file path (relative to this file) or built-in fixture
//! # n_electrons = 2               # overrides [molecule] in the Hamiltonian file
//!
//! [run]                           # every key optional
//! algorithm = "geo_adapt"         # adapt | pos_geo_adapt | pos_adapt | vqe_gd | vqe_qng_bd
//! eta = 0.1
//! kappa = 5
//! eps = 1e-4
//! max_outer = 50
//! reg = 1e-8
//! seed = 12648430
//! outer_metric = "pool"           # or "identity"
//! inner_optimizer = "qngd"        # or "qng_bd", "gd"
//! blocks = "singletons"           # or "full", or { explicit = [[0, 1], [2]] }
//! pool = { spin_conserving = true }
//!
//! [output]
//! dir = "out"
//! plot = true
//!
//! [sweep]                         # used by the `sweep` subcommand
//! etas = [0.1, 0.01, 0.001, 0.0001]
//! kappas = [5]
//! ```

use std::path::{Path, PathBuf};

use geoadapt::adapt::{Algorithm, RunConfig, DEFAULT_ETA_GRID};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub hamiltonian: Option<String>,
    pub n_electrons: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub plot: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: None, plot: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub etas: Vec<f64>,
    /// Empty means the run's own `kappa`.
    pub kappas: Vec<usize>,
    /// Empty means the run's own algorithm.
    pub algorithms: Vec<Algorithm>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { etas: DEFAULT_ETA_GRID.to_vec(), kappas: Vec::new(), algorithms: Vec::new() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputSection,
    pub sweep: Option<SweepSection>,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let cfg: FileConfig = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].matches('\n').count() + 1);
            CliError::Parse { line, message: e.message().to_string() }
        })?;
        cfg.run.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::parse_str(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
