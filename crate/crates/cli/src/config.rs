//! Versioned TOML run configuration. Every table rejects unknown keys.

use std::path::{Path, PathBuf};

use pam_core::hamiltonian::{EpsRule, LaplacianKind};
use pam_core::noise::MollifierKind;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Only schema this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Label copied into every record; defaults to the subcommand name.
    pub name: Option<String>,
    pub seeds: Vec<u64>,
    /// Run directory; `--out` takes precedence.
    pub out: Option<PathBuf>,
    pub chi: ChiConfig,
    pub eigenvalues: EigenvaluesConfig,
    pub evolve: EvolveConfig,
    pub fk: FkConfig,
    pub renorm: RenormConfig,
    pub noise_growth: NoiseGrowthConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: None,
            seeds: vec![0],
            out: None,
            chi: ChiConfig::default(),
            eigenvalues: EigenvaluesConfig::default(),
            evolve: EvolveConfig::default(),
            fk: FkConfig::default(),
            renorm: RenormConfig::default(),
            noise_growth: NoiseGrowthConfig::default(),
        }
    }
}

/// Variational constant by ascent and by the ground-state route.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChiConfig {
    pub side: f64,
    pub points: usize,
    /// Variance parameter of the Gaussian start.
    pub init_width: f64,
    pub ascent_tol: f64,
    pub max_iter: usize,
    pub flow_tol: f64,
    /// Largest accepted relative gap between the two routes.
    pub agreement: f64,
}

impl Default for ChiConfig {
    fn default() -> Self {
        Self {
            side: pam_core::chi::DEFAULT_SIDE,
            points: 129,
            init_width: 1.0,
            ascent_tol: 1e-5,
            max_iter: 5000,
            flow_tol: 1e-10,
            agreement: 1e-2,
        }
    }
}

/// Renormalised top eigenvalues over box sides and seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EigenvaluesConfig {
    pub sides: Vec<f64>,
    pub eps_rule: EpsRule,
    pub route: MollifierKind,
    /// Intercept of the logarithmic law used by the convolution route.
    pub law_intercept: f64,
    pub count: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Replace the noise by zero; the table then carries the analytic Dirichlet spectrum.
    pub zero_noise: bool,
}

impl Default for EigenvaluesConfig {
    fn default() -> Self {
        Self {
            sides: vec![4.0, 8.0, 16.0, 32.0],
            eps_rule: EpsRule::Fixed { eps: 0.5, points_per_eps: 2.0 },
            route: MollifierKind::FourierCutoff,
            law_intercept: 0.0,
            count: 3,
            tol: 1e-8,
            max_iter: 2000,
            zero_noise: false,
        }
    }
}

/// Starting datum of the evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    Delta,
    UniformOne,
}

/// Total mass against the top eigenvalue on one mollified-noise box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub side: f64,
    pub points: usize,
    /// Mollification scale in lattice spacings; `0` gives the zero potential.
    pub eps_multiple: f64,
    pub times: Vec<f64>,
    /// Strang step; the splitting bias of the top eigenvalue is O(dt²), so the
    /// expansion/stepper mass agreement needs a step well below `1e-3`.
    pub dt: f64,
    pub laplacian: LaplacianKind,
    pub initial: InitialKind,
    /// Eigenpairs used by the spectral expansion of the mass.
    pub eigenpairs: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            side: 1.5,
            points: 65,
            eps_multiple: 4.0,
            times: vec![2.0, 4.0, 8.0, 16.0],
            dt: 6.25e-5,
            laplacian: LaplacianKind::FiniteDifference,
            initial: InitialKind::Delta,
            eigenpairs: 12,
        }
    }
}

/// Monte Carlo total mass against the PDE on one mollified-noise box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FkConfig {
    pub side: f64,
    pub points: usize,
    pub eps_multiple: f64,
    pub t: f64,
    pub dt: f64,
    pub n_paths: usize,
    /// Constant `C` in `η = C(1 + M)^p`.
    pub eta_constant: f64,
    /// Replace the noise by zero; the reference is then the Dirichlet survival series.
    pub zero_noise: bool,
}

impl Default for FkConfig {
    fn default() -> Self {
        Self { side: 4.0, points: 129, eps_multiple: 4.0, t: 1.0, dt: 1e-3, n_paths: 10_000, eta_constant: 1.0, zero_noise: false }
    }
}

/// Lattice renormalisation sums against `log(1/ε)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenormConfig {
    pub side: f64,
    /// `ε = 2^-k` for each listed `k`.
    pub eps_log2: Vec<i32>,
    pub route: MollifierKind,
    pub tail_tol: f64,
}

impl Default for RenormConfig {
    fn default() -> Self {
        Self { side: 8.0, eps_log2: (4..=12).collect(), route: MollifierKind::FourierCutoff, tail_tol: 1e-8 }
    }
}

/// Noise norms and `M` over box sides at fixed `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseGrowthConfig {
    pub sides: Vec<f64>,
    pub eps: f64,
    pub lattice_multiple: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for NoiseGrowthConfig {
    fn default() -> Self {
        let g = pam_core::feynman_kac::GrowthSettings::default();
        Self {
            sides: vec![4.0, 8.0, 16.0, 32.0, 64.0],
            eps: g.eps,
            lattice_multiple: g.lattice_multiple,
            alpha: g.exponents.alpha,
            beta: g.exponents.beta,
        }
    }
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Schema(msg) => CliError::Schema(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Schema(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Schema("seeds must not be empty".into()));
        }
        let increasing = |name: &str, v: &[f64]| {
            if v.is_empty() || v.windows(2).any(|w| w[1] <= w[0]) {
                Err(CliError::Schema(format!("{name} must be a nonempty increasing list")))
            } else {
                Ok(())
            }
        };
        increasing("eigenvalues.sides", &self.eigenvalues.sides)?;
        increasing("evolve.times", &self.evolve.times)?;
        increasing("noise_growth.sides", &self.noise_growth.sides)?;
        if self.renorm.eps_log2.is_empty() {
            return Err(CliError::Schema("renorm.eps_log2 must not be empty".into()));
        }
        Ok(())
    }
}
