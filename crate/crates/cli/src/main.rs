mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{GeometryConfig, Layout, MaterialConfig, RunConfig};
use error::CliError;
use output::Sink;

/// Subwavelength resonances and scattering of nested high-contrast spherical
/// resonators.
#[derive(Debug, Parser)]
#[command(name = "subwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Resonant frequencies from the determinant search next to the
    /// capacitance asymptotics.
    Spectrum(Common),
    /// Resonator L2 norm and monopole strength over a frequency grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        omega_min: Option<f64>,
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Total field samples and per-shell statistics at one frequency.
    Field {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "mode_index")]
        omega_in: Option<f64>,
        /// 1-based resonance whose real part is used as the frequency.
        #[arg(long)]
        mode_index: Option<usize>,
        #[arg(long, value_enum)]
        layout: Option<Layout>,
        /// Samples per axis.
        #[arg(long)]
        points: Option<usize>,
    },
    /// SWE, DtN and asymptotic roots side by side, with a convergence fit.
    Compare(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// N shells with outer radii N, N-1, ..., 1 and thickness 1/2.
    #[arg(long, value_name = "N")]
    geometry_equidistant: Option<usize>,
    /// Density contrast with unit wave speeds.
    #[arg(long, value_name = "X")]
    delta: Option<f64>,
    /// Highest harmonic order.
    #[arg(long, value_name = "K")]
    nmax: Option<usize>,
    /// Primary output file (stdout when absent); companion files are
    /// written next to it.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, value_name = "T")]
    threads: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(n) = self.geometry_equidistant {
            cfg.geometry = Some(GeometryConfig::Equidistant(n));
        }
        if let Some(d) = self.delta {
            cfg.materials = MaterialConfig::Contrast(d);
        }
        if let Some(k) = self.nmax {
            cfg.n_max = k;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, cfg) = match &cli.command {
        Command::Spectrum(c) | Command::Compare(c) => (c, c.resolve()?),
        Command::Sweep {
            common,
            omega_min,
            omega_max,
            steps,
        } => {
            let mut cfg = common.resolve()?;
            if omega_min.is_some() {
                cfg.sweep.omega_min = *omega_min;
            }
            if omega_max.is_some() {
                cfg.sweep.omega_max = *omega_max;
            }
            if let Some(s) = steps {
                cfg.sweep.steps = *s;
            }
            (common, cfg)
        }
        Command::Field {
            common,
            omega_in,
            mode_index,
            layout,
            points,
        } => {
            let mut cfg = common.resolve()?;
            if omega_in.is_some() {
                cfg.field.omega_in = *omega_in;
                cfg.field.mode_index = None;
            }
            if mode_index.is_some() {
                cfg.field.mode_index = *mode_index;
                cfg.field.omega_in = None;
            }
            if let Some(l) = layout {
                cfg.field.layout = *l;
            }
            if let Some(p) = points {
                cfg.field.points = *p;
            }
            (common, cfg)
        }
    };
    let validated = cfg.validate()?;
    if let Some(t) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::ThreadPool(e.to_string()))?;
    }
    let sink = Sink::new(common.out.clone());
    match cli.command {
        Command::Spectrum(_) => commands::spectrum(&cfg, &validated, &sink),
        Command::Sweep { .. } => commands::sweep_cmd(&cfg, &validated, &sink),
        Command::Field { .. } => commands::field(&cfg, &validated, &sink),
        Command::Compare(_) => commands::compare(&cfg, &validated, &sink),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
