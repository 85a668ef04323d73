use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};
use dynlab::{output, Config, ExperimentId, LabError};

#[derive(Parser)]
#[command(name = "dynlab", version, about = "Numerical experiments on Siegel disks and filled Julia sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON, or TOML by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Continued-fraction table.
    Cf,
    /// Linearization diagnostics.
    Siegel,
    /// Filled Julia set area.
    Area,
    /// Density persistence, quadratic family.
    E1,
    /// Density persistence, cubic family.
    E1b,
    /// Area persistence.
    E2,
    /// Deep points of K(delta).
    E3,
    /// Quadratic-like verification.
    E4,
    /// Near-parabolic renormalization sector check.
    E5,
    /// Box dimension of the Julia set.
    E6,
}

impl Command {
    fn experiment(self) -> ExperimentId {
        match self {
            Command::Cf => ExperimentId::Cf,
            Command::Siegel => ExperimentId::Siegel,
            Command::Area => ExperimentId::Area,
            Command::E1 => ExperimentId::E1,
            Command::E1b => ExperimentId::E1b,
            Command::E2 => ExperimentId::E2,
            Command::E3 => ExperimentId::E3,
            Command::E4 => ExperimentId::E4,
            Command::E5 => ExperimentId::E5,
            Command::E6 => ExperimentId::E6,
        }
    }
}

fn load(cli: &Cli) -> Result<Config, LabError> {
    let id = cli.command.experiment();
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default_for(id),
    };
    if config.experiment != id {
        return Err(LabError::Config(format!(
            "config is for {} but the subcommand is {}",
            config.experiment.name(),
            id.command()
        )));
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("dynlab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("dynlab: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let dir = cli
        .out
        .clone()
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("dynlab-out").join(config.experiment.command()));

    let start = Instant::now();
    let report = match dynlab::run(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("dynlab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = output::write_outputs(&report, &config, &dir, start.elapsed())
        .with_context(|| format!("writing {}", dir.display()))
    {
        eprintln!("dynlab: {e:#}");
        return ExitCode::from(3);
    }

    println!("{} ({})", config.experiment.name(), config.hash());
    for c in &report.checks {
        let measured = c.measured.map(|m| m.to_string()).unwrap_or_else(|| "n/a".into());
        println!("  {} {}: {} (want {})", if c.passed { "PASS" } else { "FAIL" }, c.name, measured, c.threshold);
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
    let verdict = report.verdict();
    println!("verdict: {verdict:?} -> {}", dir.display());
    ExitCode::from(verdict.exit_code() as u8)
}
