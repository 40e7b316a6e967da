//! `habc`: command-line front end for the absorbing-boundary workbench.

mod commands;
mod manifest;
mod params;

use clap::{Parser, Subcommand};
use helmholtz_abc::{Error, ErrorCategory};
use params::*;
use serde::de::DeserializeOwned;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "habc", version, about = "Padé absorbing boundary conditions for 2D Helmholtz scattering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Padé coefficients, vanishing angles and admissibility of an (M, N) condition.
    Pade {
        #[command(flatten)]
        params: PadeParams,
        /// TOML file with the same keys as the flags.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Triangulate a scene.
    Mesh {
        #[command(flatten)]
        params: MeshParams,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve the truncated scattering problem with an absorbing condition.
    Solve {
        #[command(flatten)]
        params: SolveParams,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve the PML reference problem.
    Reference {
        #[command(flatten)]
        params: ReferenceParams,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate the exact series for a sound-soft disc on a polar grid.
    Mie {
        #[command(flatten)]
        params: MieParams,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Ray diagnostics: direct rays, hit angles, square unfolding, re-entrant energy.
    Rays {
        #[command(flatten)]
        params: RaysParams,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Paired absorbing-condition / PML runs over a table of (k, R).
    Experiment {
        #[command(flatten)]
        params: ExperimentParams,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn layered<T: DeserializeOwned + Default>(config: Option<&Path>) -> Result<T, Error> {
    let Some(path) = config else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Pade { params, config } => commands::pade(params.layered(layered(config.as_deref())?)),
        Command::Mesh { params, config } => commands::mesh(params.layered(layered(config.as_deref())?)),
        Command::Solve { params, config } => commands::solve(params.layered(layered(config.as_deref())?)),
        Command::Reference { params, config } => commands::reference(params.layered(layered(config.as_deref())?)),
        Command::Mie { params, config } => commands::mie(params.layered(layered(config.as_deref())?)),
        Command::Rays { params, config } => commands::rays(params.layered(layered(config.as_deref())?)),
        Command::Experiment { params, config } => {
            commands::experiment(params.layered(layered(config.as_deref())?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (category, code) = match e.category() {
                ErrorCategory::Numerical => ("numerical", 1),
                ErrorCategory::Usage => ("usage", 2),
                ErrorCategory::Io => ("io", 3),
            };
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: {category}: {}: {message}", e.tag());
            ExitCode::from(code)
        }
    }
}
