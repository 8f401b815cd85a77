//! Command-line front end for the `ppsf` library.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, SigmaSetting};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ppsf", version, about = "Pseudo prolate spheroidal functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the concentration operator for every r.
    Eig(Overrides),
    /// Build the pseudo prolate family and check its residuals.
    Construct(Overrides),
    /// Count functions over the r ladder and compare slopes.
    Sweep(Overrides),
    /// Run the invariant suite (writes nothing).
    Verify(Overrides),
    /// Sample the Slepian approximate-dimension functions g_j.
    Slepian(Overrides),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// A number or "auto" (sigma^2 = epsilon/10).
    #[arg(long)]
    pub sigma: Option<SigmaSetting>,
    /// Run at this single dilation instead of sweep.r_list.
    #[arg(long)]
    pub r: Option<f64>,
    /// Output directory (overrides the config and PPSF_OUT_DIR).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    pub plots: bool,
}

impl Overrides {
    /// Loads the configuration, applies the overrides and validates.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(e) = self.epsilon {
            cfg.budget.epsilon = e;
        }
        if let Some(s) = self.sigma {
            cfg.budget.sigma = s;
        }
        if let Some(r) = self.r {
            cfg.sweep.r_list = vec![r];
        }
        if let Some(o) = &self.out {
            cfg.output.directory = Some(o.clone());
        }
        if self.plots {
            cfg.output.emit_plots = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

type Action = fn(&RunConfig) -> Result<commands::Outcome, CliError>;

/// Runs a parsed command, printing progress to stdout. Returns the exit status.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let (overrides, action): (&Overrides, Action) = match &cli.command {
        Command::Eig(o) => (o, commands::eig),
        Command::Construct(o) => (o, commands::construct),
        Command::Sweep(o) => (o, commands::sweep),
        Command::Slepian(o) => (o, commands::slepian),
        Command::Verify(o) => {
            let cfg = o.resolve()?;
            let results = verify::run_suites(&cfg);
            print!("{}", verify::render_table(&results));
            return match results.iter().find(|r| !r.passed) {
                None => Ok(error::EXIT_OK),
                Some(f) => Err(CliError::Numerical(format!("suite {} failed", f.name))),
            };
        }
    };
    let cfg = overrides.resolve()?;
    let outcome = action(&cfg)?;
    for m in &outcome.messages {
        println!("{m}");
    }
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(error::EXIT_OK)
}
