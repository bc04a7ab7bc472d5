use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::PoolOptions;
use crate::geometry::{BlockSpec, DEFAULT_REG};

/// Chemical-accuracy threshold in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;
pub const DEFAULT_ETA_GRID: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const DEFAULT_KAPPA: usize = 5;
pub const DEFAULT_EPS: f64 = 1e-4;
pub const DEFAULT_MAX_OUTER: usize = 50;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    GeoAdapt,
    Adapt,
    PosGeoAdapt,
    PosAdapt,
    VqeGd,
    VqeQngBd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::GeoAdapt,
        Algorithm::Adapt,
        Algorithm::PosGeoAdapt,
        Algorithm::PosAdapt,
        Algorithm::VqeGd,
        Algorithm::VqeQngBd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::GeoAdapt => "geo_adapt",
            Algorithm::Adapt => "adapt",
            Algorithm::PosGeoAdapt => "pos_geo_adapt",
            Algorithm::PosAdapt => "pos_adapt",
            Algorithm::VqeGd => "vqe_gd",
            Algorithm::VqeQngBd => "vqe_qng_bd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm '{s}'")))
    }

    pub fn is_adaptive(self) -> bool {
        !matches!(self, Algorithm::VqeGd | Algorithm::VqeQngBd)
    }

    pub fn is_positional(self) -> bool {
        matches!(self, Algorithm::PosGeoAdapt | Algorithm::PosAdapt)
    }

    pub fn default_outer_metric(self) -> OuterMetric {
        match self {
            Algorithm::GeoAdapt | Algorithm::PosGeoAdapt => OuterMetric::Pool,
            _ => OuterMetric::Identity,
        }
    }

    pub fn default_inner(self) -> InnerOptimizer {
        match self {
            Algorithm::GeoAdapt | Algorithm::PosGeoAdapt => InnerOptimizer::Qngd,
            Algorithm::Adapt | Algorithm::PosAdapt | Algorithm::VqeGd => InnerOptimizer::Gd,
            Algorithm::VqeQngBd => InnerOptimizer::QngBd,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Metric used to turn the pool gradient into a selection score.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterMetric {
    Pool,
    Identity,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerOptimizer {
    /// Full ansatz metric.
    Qngd,
    /// Block-diagonal ansatz metric, blocks from [`RunConfig::blocks`].
    QngBd,
    Gd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub eta: f64,
    pub kappa: usize,
    pub eps: f64,
    pub max_outer: usize,
    pub reg: f64,
    pub seed: u64,
    pub pool: PoolOptions,
    pub outer_metric: Option<OuterMetric>,
    pub inner_optimizer: Option<InnerOptimizer>,
    pub blocks: BlockSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::GeoAdapt,
            eta: 1e-1,
            kappa: DEFAULT_KAPPA,
            eps: DEFAULT_EPS,
            max_outer: DEFAULT_MAX_OUTER,
            reg: DEFAULT_REG,
            seed: crate::eigen::DEFAULT_SEED,
            pool: PoolOptions::default(),
            outer_metric: None,
            inner_optimizer: None,
            blocks: BlockSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self { algorithm, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidConfig(format!("eta must be positive, got {}", self.eta)));
        }
        if self.kappa < 1 {
            return Err(Error::InvalidConfig("kappa must be at least 1".into()));
        }
        if self.eps.is_nan() || self.eps < 0.0 {
            return Err(Error::InvalidConfig(format!("eps must be >= 0, got {}", self.eps)));
        }
        if self.max_outer < 1 {
            return Err(Error::InvalidConfig("max_outer must be at least 1".into()));
        }
        if !(self.reg >= 0.0 && self.reg.is_finite()) {
            return Err(Error::InvalidConfig(format!("reg must be finite and >= 0, got {}", self.reg)));
        }
        Ok(())
    }

    pub fn outer_metric(&self) -> OuterMetric {
        self.outer_metric.unwrap_or_else(|| self.algorithm.default_outer_metric())
    }

    pub fn inner_optimizer(&self) -> InnerOptimizer {
        self.inner_optimizer.unwrap_or_else(|| self.algorithm.default_inner())
    }
}
