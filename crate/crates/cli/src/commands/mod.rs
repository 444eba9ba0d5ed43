//! One module per experiment subcommand. Each writes its artifacts through a [`RunWriter`]
//! and returns a short human-readable summary.

pub mod chi;
pub mod eigenvalues;
pub mod evolve;
pub mod fk;
pub mod noise_growth;
pub mod renorm;

use pam_core::grid::{BoxSpec, GridField};
use pam_core::noise::{mollify, sample_white_noise, subtraction_constant, MollifierKind, MollifierSpec, RenormLaw};

use crate::config::RunConfig;
use crate::error::Result;
use crate::record::RunWriter;

/// Printed lines and, when the run's own check failed, the reason.
#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub lines: Vec<String>,
    pub failure: Option<String>,
}

/// Experiments that produce records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Chi,
    Eigenvalues,
    Evolve,
    Fk,
    Renorm,
    NoiseGrowth,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Chi => "chi",
            Experiment::Eigenvalues => "eigenvalues",
            Experiment::Evolve => "evolve",
            Experiment::Fk => "fk",
            Experiment::Renorm => "renorm",
            Experiment::NoiseGrowth => "noise-growth",
        }
    }

    pub fn run(self, config: &RunConfig, writer: &mut RunWriter) -> Result<Summary> {
        match self {
            Experiment::Chi => chi::run(config, writer),
            Experiment::Eigenvalues => eigenvalues::run(config, writer),
            Experiment::Evolve => evolve::run(config, writer),
            Experiment::Fk => fk::run(config, writer),
            Experiment::Renorm => renorm::run(config, writer),
            Experiment::NoiseGrowth => noise_growth::run(config, writer),
        }
    }
}

/// Fourier-cutoff mollified white noise with `ε = eps_multiple · Δx` and its exact subtraction
/// constant; `eps_multiple = 0` gives the zero potential with `c = 0`.
pub(crate) fn mollified_noise(spec: &BoxSpec, eps_multiple: f64, seed: u64) -> Result<(GridField, f64)> {
    if eps_multiple == 0.0 {
        return Ok((GridField::zeros(*spec), 0.0));
    }
    let ms = MollifierSpec::new(MollifierKind::FourierCutoff, eps_multiple * spec.spacing())?;
    let c = subtraction_constant(spec.side(), &ms, &RenormLaw::standard(0.0))?;
    Ok((mollify(&sample_white_noise(spec, seed), &ms)?.field, c))
}
