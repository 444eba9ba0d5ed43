//! `pamlab`: configuration, orchestration and persistence of the numerical experiments.

pub mod commands;
pub mod config;
pub mod error;
pub mod record;
pub mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Experiment;
use config::RunConfig;
use error::{CliError, Result};
use record::RunWriter;

#[derive(Debug, Parser)]
#[command(name = "pamlab", version, about = "Experiments for the 2D parabolic Anderson model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; defaults apply to every omitted key.
    #[arg(long, global = true, env = "PAMLAB_CONFIG")]
    pub config: Option<PathBuf>,
    /// Replaces the configured seed list by this single seed.
    #[arg(long, global = true, env = "PAMLAB_SEED")]
    pub seed: Option<u64>,
    /// Run directory (created when missing).
    #[arg(long, global = true, env = "PAMLAB_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "PAMLAB_THREADS")]
    pub threads: Option<usize>,
    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Variational constant by ascent and by the ground-state route.
    Chi,
    /// Renormalised top eigenvalues and the λ₁/log L trend.
    Eigenvalues,
    /// Total mass growth against the top eigenvalue.
    Evolve,
    /// Monte Carlo total mass against the PDE.
    Fk,
    /// Lattice renormalisation constants against log(1/ε).
    Renorm,
    /// Noise norms and M against log L.
    NoiseGrowth,
    /// Aggregate every record under a directory.
    Report { run_dir: PathBuf },
}

impl Command {
    fn experiment(&self) -> Option<Experiment> {
        match self {
            Command::Chi => Some(Experiment::Chi),
            Command::Eigenvalues => Some(Experiment::Eigenvalues),
            Command::Evolve => Some(Experiment::Evolve),
            Command::Fk => Some(Experiment::Fk),
            Command::Renorm => Some(Experiment::Renorm),
            Command::NoiseGrowth => Some(Experiment::NoiseGrowth),
            Command::Report { .. } => None,
        }
    }
}

/// Configuration after applying the file and the command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seeds = vec![seed];
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

/// Runs the parsed command, printing progress to stdout and warnings to stderr.
pub fn run(cli: &Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Threads(e.to_string()))?;
    }
    let config = resolve_config(cli)?;
    if cli.dry_run {
        print!("{}", config.to_toml()?);
        return Ok(());
    }
    let Some(experiment) = cli.command.experiment() else {
        let Command::Report { run_dir } = &cli.command else { unreachable!() };
        let report = report::build(run_dir)?;
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        for p in &report.problems {
            eprintln!("warning: skipped {}: {}", p.path, p.reason);
        }
        report::write(&report, cli.out.as_deref().unwrap_or(run_dir))?;
        println!("report over {} records ({} skipped)", report.sources.len(), report.problems.len());
        return Ok(());
    };
    let dir = config.out.clone().unwrap_or_else(|| {
        PathBuf::from("runs").join(config.name.clone().unwrap_or_else(|| experiment.name().to_string()))
    });
    let mut writer = RunWriter::create(&dir)?;
    let start = Instant::now();
    let summary = experiment.run(&config, &mut writer)?;
    writer.finish(experiment.name(), &config, start.elapsed().as_secs_f64())?;
    for line in &summary.lines {
        println!("{line}");
    }
    println!("records written to {}", dir.display());
    match summary.failure {
        Some(reason) => Err(CliError::CheckFailed(reason)),
        None => Ok(()),
    }
}
