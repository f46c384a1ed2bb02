//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification checks failed, 2 configuration
//! error, 3 domain error (an invalid channel or potential), 4 I/O error.

mod commands;
pub mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{ladder_report, spectrum_rows, verify_report, wavefunction_grid};
pub use config::{OutputFormat, PotentialSpec, PresetKind, RunConfig, Units};
pub use output::{format_float, OUT_DIR_ENV};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Domain(#[from] crate::Error),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    ChecksFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mie-spectra",
    version,
    about = "Bound states of Mie-type potentials in N dimensions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form energy table over (N, l, n).
    Spectrum(CommonArgs),
    /// Sampled radial eigenfunction of one state.
    Wavefunction {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        ell: u32,
        #[arg(long = "dim", default_value_t = 3)]
        dim: u32,
        /// Add the radial-equation residual as a third column.
        #[arg(long)]
        residual: bool,
    },
    /// Ladder-operator coefficients, commutators, Casimir and differential fits.
    LadderCheck(CommonArgs),
    /// Closed form against the finite-difference oracle.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Negative control: solve on a deliberately coarse grid.
        #[arg(long)]
        coarsen: bool,
    },
    /// List the available presets and their default parameters.
    Presets,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration; flags below override its values.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<PresetKind>,
    #[arg(long = "A", allow_hyphen_values = true)]
    pub inv_square: Option<f64>,
    #[arg(long = "B", allow_hyphen_values = true)]
    pub inv_linear: Option<f64>,
    #[arg(long = "C", allow_hyphen_values = true)]
    pub offset: Option<f64>,
    #[arg(long = "D0")]
    pub depth: Option<f64>,
    #[arg(long)]
    pub r0: Option<f64>,
    /// First Mie exponent.
    #[arg(long = "a")]
    pub exp_a: Option<f64>,
    /// Second Mie exponent.
    #[arg(long = "b")]
    pub exp_b: Option<f64>,
    /// Modified-Kratzer sign convention: standard or inverted.
    #[arg(long)]
    pub convention: Option<String>,
    #[arg(long = "M")]
    pub mass: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long)]
    pub ell_max: Option<u32>,
    /// Comma-separated dimensions, e.g. 2,3,5.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<u32>>,
    #[arg(long, allow_hyphen_values = true)]
    pub r_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Finite-difference cells per channel.
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Output file; `-` writes to stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Also write the fully resolved configuration to this path.
    #[arg(long)]
    pub save_config: Option<PathBuf>,
}

impl CommonArgs {
    fn sets_potential(&self) -> bool {
        self.preset.is_some()
            || [
                self.inv_square,
                self.inv_linear,
                self.offset,
                self.depth,
                self.r0,
                self.exp_a,
                self.exp_b,
            ]
            .iter()
            .any(Option::is_some)
            || self.convention.is_some()
    }

    /// Loads the config file (or the defaults) and applies the flags.
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(kind) = self.preset {
            if kind != c.potential.preset {
                c.potential = PotentialSpec::bare(kind);
            }
        }
        let p = &mut c.potential;
        override_with(&mut p.inv_square, self.inv_square);
        override_with(&mut p.inv_linear, self.inv_linear);
        override_with(&mut p.offset, self.offset);
        override_with(&mut p.depth, self.depth);
        override_with(&mut p.r0, self.r0);
        override_with(&mut p.exp_a, self.exp_a);
        override_with(&mut p.exp_b, self.exp_b);
        if let Some(name) = &self.convention {
            let parsed = serde_json::from_value(serde_json::Value::String(name.clone()))
                .map_err(|_| CliError::Config(format!("unknown convention {name}")))?;
            p.convention = Some(parsed);
        }
        if let Some(m) = self.mass {
            c.units.mass = m;
        }
        if let Some(h) = self.hbar {
            c.units.hbar = h;
        }
        if let Some(n) = self.n_max {
            c.n_max = n;
        }
        if let Some(l) = self.ell_max {
            c.ell_max = l;
        }
        if let Some(d) = &self.dims {
            c.dims = d.clone();
        }
        override_with(&mut c.grid.r_min, self.r_min);
        override_with(&mut c.grid.r_max, self.r_max);
        override_with(&mut c.grid.points, self.points);
        override_with(&mut c.grid.cells, self.cells);
        if let Some(f) = self.format {
            c.format = f;
        }
        if let Some(o) = &self.output {
            c.output = Some(o.clone());
        }
        if let Some(d) = &self.output_dir {
            c.output_dir = Some(d.clone());
        }
        let c = c.resolve()?;
        if let Some(path) = &self.save_config {
            output::write_file(path, &(c.to_json() + "\n"))?;
        }
        Ok(c)
    }
}

fn override_with<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

/// Runs a parsed command line and maps the outcome to an exit code.
pub fn run(cli: Cli) -> ExitCode {
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mie-spectra: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Spectrum(args) => commands::cmd_spectrum(&args.run_config()?),
        Command::Wavefunction {
            common,
            n,
            ell,
            dim,
            residual,
        } => commands::cmd_wavefunction(&common.run_config()?, n, ell, dim, residual),
        Command::LadderCheck(args) => commands::cmd_ladder_check(&args.run_config()?),
        Command::Verify { common, coarsen } => {
            // Without a config file or potential flags, run the standard suite.
            let suite = common.config.is_none() && !common.sets_potential();
            let mut config = common.run_config()?;
            if suite && common.dims.is_none() {
                config.dims = vec![2, 3, 5];
            }
            commands::cmd_verify(&config, suite, coarsen)
        }
        Command::Presets => commands::cmd_presets(),
    }
}
