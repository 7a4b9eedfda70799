//! `nodsis` — coupled opinion-epidemic model runner.
//!
//! Subcommands: `simulate`, `equilibria`, `bifurcate`, `basin`, `network`.
//! Settings resolve in order: defaults, preset, config file, command-line
//! flags. Exit codes: 0 success, 2 configuration error, 3 trapping-region
//! violation (step size too large), 4 non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;
mod presets;

use config::ResolvedConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Lib(nodsis::Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration: {msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Lib(nodsis::Error::InvarianceViolation { .. }) => 3,
            CliError::Lib(nodsis::Error::NonConvergent) => 4,
            _ => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "nodsis",
    version,
    about = "Coupled opinion-epidemic (SIS + nonlinear opinion) model: \
             simulation, equilibria, bifurcation diagrams, basins, networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment preset; see --help for the list.
    #[arg(long, long_help = presets::PRESET_SUMMARY)]
    preset: Option<String>,
    /// Config file (flat key = value with section headers).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted. Commands with a second table write
    /// it to a sibling file (<stem>.<table>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for every randomized draw.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format (csv only).
    #[arg(long)]
    format: Option<String>,
    /// Transmissibility.
    #[arg(long)]
    beta: Option<f64>,
    /// Recovery rate.
    #[arg(long)]
    delta: Option<f64>,
    /// Infection feedback gain.
    #[arg(long)]
    kp: Option<f64>,
    /// Peer-pressure feedback gain.
    #[arg(long)]
    kx: Option<f64>,
    /// Basal urgency.
    #[arg(long)]
    u0: Option<f64>,
    /// Opinion timescale.
    #[arg(long)]
    taux: Option<f64>,
    /// Integration step size.
    #[arg(long)]
    dt: Option<f64>,
    /// Integration horizon.
    #[arg(long)]
    tend: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate trajectories of the scalar model.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Initial infected fraction (defaults to 0.1 for single runs).
        #[arg(long)]
        p0: Option<f64>,
        /// Initial opinion (defaults to 0.1 for single runs).
        #[arg(long)]
        x0: Option<f64>,
        /// Number of seeded random-start runs (1 = use --p0/--x0).
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Locate and classify every equilibrium; report regime and thresholds.
    Equilibria {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one parameter and assemble the bifurcation diagram.
    Bifurcate {
        #[command(flatten)]
        common: Common,
        /// Which parameter to sweep (beta, delta, kp, kx, u0, taux).
        #[arg(long)]
        sweep_parameter: Option<String>,
        /// Sweep grid lower end.
        #[arg(long)]
        sweep_min: Option<f64>,
        /// Sweep grid upper end.
        #[arg(long)]
        sweep_max: Option<f64>,
        /// Sweep grid size.
        #[arg(long)]
        sweep_points: Option<usize>,
    },
    /// Classify seeded random initial conditions by their limit equilibrium.
    Basin {
        #[command(flatten)]
        common: Common,
        /// Number of random initial conditions.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Integrate the structured-population model on a graph pair.
    Network {
        #[command(flatten)]
        common: Common,
        /// Contact graph edge-list file.
        #[arg(long)]
        contact: Option<PathBuf>,
        /// Communication graph edge-list file (signed weights).
        #[arg(long)]
        communication: Option<PathBuf>,
        /// Sign pattern of the seeded initial opinions (neg, pos, mixed).
        #[arg(long)]
        x0_sign: Option<String>,
        /// Urgency convention (as-written, communication-degree,
        /// neighbor-opinions).
        #[arg(long)]
        urgency: Option<String>,
        /// Uniform initial infected fraction (overrides the seeded draw).
        #[arg(long)]
        p0: Option<f64>,
        /// Uniform initial opinion (overrides the seeded draw).
        #[arg(long)]
        x0: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Equilibria { .. } => "equilibria",
            Command::Bifurcate { .. } => "bifurcate",
            Command::Basin { .. } => "basin",
            Command::Network { .. } => "network",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Simulate { common, .. }
            | Command::Equilibria { common }
            | Command::Bifurcate { common, .. }
            | Command::Basin { common, .. }
            | Command::Network { common, .. } => common,
        }
    }
}

/// Defaults -> preset -> config file -> flags.
fn resolve(cmd: &Command) -> Result<ResolvedConfig, CliError> {
    let common = cmd.common();
    let mut cfg = ResolvedConfig::defaults(cmd.name());

    if let Some(fmt) = &common.format {
        if fmt != "csv" {
            return Err(CliError::Config(format!(
                "unsupported format {fmt:?} (only csv)"
            )));
        }
    }

    // Parse the file first so a preset named inside it applies beneath the
    // file's own keys.
    let parsed_file = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            let base = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .map(|p| p.to_path_buf())
                .unwrap_or_else(|| PathBuf::from("."));
            Some(config::parse_config(&text, &base)?)
        }
        None => None,
    };

    let file_preset = parsed_file.as_ref().and_then(|f| f.preset.clone());
    let preset = match (&common.preset, &file_preset) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::Config(format!(
                "preset {a:?} from the command line conflicts with preset {b:?} from the config file"
            )))
        }
        (Some(a), _) => Some(a.clone()),
        (None, Some(b)) => Some(b.clone()),
        (None, None) => None,
    };
    if let Some(name) = &preset {
        presets::apply_preset(name, &mut cfg)?;
    }

    if let Some(file) = &parsed_file {
        file.apply(&mut cfg)?;
    }

    // Flags override everything.
    let m = &mut cfg.model;
    if let Some(v) = common.beta {
        m.beta = v;
    }
    if let Some(v) = common.delta {
        m.delta = v;
    }
    if let Some(v) = common.kp {
        m.kp = v;
    }
    if let Some(v) = common.kx {
        m.kx = v;
    }
    if let Some(v) = common.u0 {
        m.u0 = v;
    }
    if let Some(v) = common.taux {
        m.taux = v;
    }
    if let Some(v) = common.dt {
        cfg.integration.dt = v;
    }
    if let Some(v) = common.tend {
        cfg.integration.tend = v;
    }
    if let Some(v) = common.seed {
        cfg.experiment.seed = v;
    }

    match cmd {
        Command::Simulate { p0, x0, runs, .. } => {
            if let Some(v) = p0 {
                cfg.experiment.p0 = Some(*v);
            }
            if let Some(v) = x0 {
                cfg.experiment.x0 = Some(*v);
            }
            if let Some(v) = runs {
                cfg.experiment.runs = *v;
            }
        }
        Command::Basin { samples, .. } => {
            if let Some(v) = samples {
                cfg.experiment.samples = *v;
            }
        }
        Command::Bifurcate {
            sweep_parameter,
            sweep_min,
            sweep_max,
            sweep_points,
            ..
        } => {
            if let Some(v) = sweep_parameter {
                cfg.sweep.parameter = v.clone();
            }
            if let Some(v) = sweep_min {
                cfg.sweep.min = *v;
            }
            if let Some(v) = sweep_max {
                cfg.sweep.max = *v;
            }
            if let Some(v) = sweep_points {
                cfg.sweep.points = *v;
            }
        }
        Command::Network {
            contact,
            communication,
            x0_sign,
            urgency,
            p0,
            x0,
            ..
        } => {
            if let Some(path) = contact {
                cfg.network.contact = Some(config::graph_source_from_flag(path)?);
            }
            if let Some(path) = communication {
                cfg.network.communication = Some(config::graph_source_from_flag(path)?);
            }
            if let Some(v) = x0_sign {
                cfg.network.x0_sign = v.clone();
            }
            if let Some(v) = urgency {
                cfg.network.urgency = v.clone();
            }
            if let Some(v) = p0 {
                cfg.experiment.p0 = Some(*v);
            }
            if let Some(v) = x0 {
                cfg.experiment.x0 = Some(*v);
            }
        }
        Command::Equilibria { .. } => {}
    }

    // A preset graph named on the command line must survive a config file
    // that sets only one side; nothing to do — precedence already handled.
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let resolved = resolve(&cli.command)?;
    let start = Instant::now();
    let out = match &cli.command {
        Command::Simulate { .. } => commands::run_simulate(&resolved)?,
        Command::Equilibria { .. } => commands::run_equilibria(&resolved)?,
        Command::Bifurcate { .. } => commands::run_bifurcate(&resolved)?,
        Command::Basin { .. } => commands::run_basin(&resolved)?,
        Command::Network { .. } => commands::run_network(&resolved)?,
    };
    let wall = start.elapsed().as_secs_f64();
    let written = output::write_output(
        cli.command.common().out.as_deref(),
        &resolved,
        &out,
        wall,
    )?;
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                0
            } else {
                2
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
