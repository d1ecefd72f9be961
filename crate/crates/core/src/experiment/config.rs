use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial::InitialData;
use crate::integrator::{CutoffSpec, SolverConfig};
use crate::montecarlo::{geometric_ladder, EnsembleConfig};
use crate::noise::NoiseSpec;
use crate::probes::{ConvergenceConfig, ConvolutionConfig, DispersiveConfig};
use crate::spectral::GridSpec;

/// `[run]`: a single trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub horizon: f64,
    /// Record diagnostics every `log_stride` steps.
    #[serde(default = "default_stride")]
    pub log_stride: u64,
    #[serde(default)]
    pub continue_after_crossing: bool,
}

fn default_stride() -> u64 {
    100
}

/// `count` horizons `t_max·ratio^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSpec {
    pub t_max: f64,
    pub ratio: f64,
    pub count: usize,
}

/// `[ensemble]`: Monte Carlo over a horizon ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub trajectories: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<LadderSpec>,
    #[serde(default = "yes")]
    pub nested: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
}

fn yes() -> bool {
    true
}

/// `[fit]`: how `scaling` fits the estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    #[serde(default = "quarter")]
    pub fixed_beta: f64,
    #[serde(default = "yes")]
    pub free_beta: bool,
    #[serde(default)]
    pub bootstrap: usize,
}

fn quarter() -> f64 {
    0.25
}

impl Default for FitSection {
    fn default() -> Self {
        Self { fixed_beta: quarter(), free_beta: true, bootstrap: 0 }
    }
}

/// `[probe.khintchine]`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KhintchineSection {
    #[serde(default = "default_rhos")]
    pub rho: Vec<f64>,
    #[serde(default = "default_khintchine_samples")]
    pub samples: usize,
    /// Explicit coefficient vectors; when absent, `(1)`, `(1,1)/√2` and a
    /// seeded random vector of dimension `random_dim` are used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_random_dim")]
    pub random_dim: usize,
}

fn default_rhos() -> Vec<f64> {
    vec![2.0, 4.0, 8.0]
}

fn default_khintchine_samples() -> usize {
    100_000
}

fn default_random_dim() -> usize {
    32
}

impl Default for KhintchineSection {
    fn default() -> Self {
        Self {
            rho: default_rhos(),
            samples: default_khintchine_samples(),
            coefficients: None,
            random_dim: default_random_dim(),
        }
    }
}

/// `[probe]` with one optional table per probe.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub khintchine: Option<KhintchineSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersive: Option<DispersiveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bdg: Option<ConvolutionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
}

fn is_default_probe(p: &ProbeSection) -> bool {
    p == &ProbeSection::default()
}

/// A complete experiment description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    /// Default output directory (the `--out` flag wins).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Worker threads; kept out of summaries because results never depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub cutoff: CutoffSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run: Option<RunSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSection>,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default, skip_serializing_if = "is_default_probe")]
    pub probe: ProbeSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

fn missing(section: &str) -> Error {
    Error::Config(format!("missing [{section}] section"))
}

impl ExperimentConfig {
    /// Parses TOML; unknown keys and type errors report the offending key and
    /// its line.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Serializes with every default written out.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks the sections that are present.
    pub fn validate(&self) -> Result<()> {
        let wrap = |section: &str, r: Result<()>| r.map_err(|e| Error::Config(format!("[{section}]: {e}")));
        if let Some(g) = &self.grid {
            wrap("grid", g.validate())?;
        }
        if let Some(s) = &self.solver {
            wrap("solver", s.validate())?;
        }
        if let Some(n) = &self.noise {
            wrap("noise", n.validate())?;
        }
        wrap("cutoff", self.cutoff.validate())?;
        if let Some(e) = &self.ensemble {
            if e.horizons.is_some() == e.ladder.is_some() {
                return Err(Error::Config("[ensemble]: give exactly one of `horizons` and `ladder`".into()));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<&GridSpec> {
        self.grid.as_ref().ok_or_else(|| missing("grid"))
    }

    pub fn solver(&self) -> Result<&SolverConfig> {
        self.solver.as_ref().ok_or_else(|| missing("solver"))
    }

    /// The noise spec, or the silent one when the section is absent.
    pub fn noise(&self) -> NoiseSpec {
        self.noise.clone().unwrap_or_else(NoiseSpec::none)
    }

    pub fn initial(&self) -> Result<&InitialData> {
        self.initial.as_ref().ok_or_else(|| missing("initial"))
    }

    pub fn run_section(&self) -> Result<&RunSection> {
        self.run.as_ref().ok_or_else(|| missing("run"))
    }

    /// Assembles the ensemble runner configuration.
    pub fn ensemble_config(&self, workers: usize) -> Result<EnsembleConfig> {
        let section = self.ensemble.as_ref().ok_or_else(|| missing("ensemble"))?;
        let horizons = match (&section.horizons, &section.ladder) {
            (Some(h), None) => h.clone(),
            (None, Some(l)) => geometric_ladder(l.t_max, l.ratio, l.count)
                .map_err(|e| Error::Config(format!("[ensemble.ladder]: {e}")))?,
            _ => return Err(Error::Config("[ensemble]: give exactly one of `horizons` and `ladder`".into())),
        };
        let cfg = EnsembleConfig {
            grid: *self.grid()?,
            solver: self.solver()?.clone(),
            noise: self.noise(),
            cutoff: self.cutoff,
            initial: self.initial()?.clone(),
            trajectories: section.trajectories,
            horizons,
            nested: section.nested,
            seed: self.seed,
            workers,
            t0: section.t0,
        };
        cfg.validate().map_err(|e| Error::Config(format!("[ensemble]: {e}")))?;
        Ok(cfg)
    }

    /// Copy for summaries: no worker count, no output directory.
    pub fn echo(&self) -> Self {
        Self { workers: None, output: None, ..self.clone() }
    }
}
