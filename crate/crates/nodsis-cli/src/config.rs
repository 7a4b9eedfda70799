//! Experiment configuration: defaults, preset application, config-file
//! parsing, and command-line overrides, resolved in that order.
//!
//! The config file is flat `key = value` text with section headers:
//!
//! ```text
//! preset = fig2            # optional; applied beneath the file's own keys
//! [model]
//! beta = 0.75
//! delta = 0.3
//! kp = 0.7
//! kx = 0.3
//! u0 = 0.7
//! taux = 1
//! [integration]
//! dt = 0.01
//! tend = 500
//! convergence_tol = 0.0000000001
//! record_stride = 10
//! [experiment]
//! seed = 42
//! samples = 100
//! runs = 1
//! p0 = 0.1
//! x0 = 0.1
//! [sweep]
//! parameter = beta
//! min = 0.01
//! max = 0.99
//! points = 400
//! [network]
//! contact = graphs/fig4_contact.txt
//! communication = graphs/fig4_coop.txt
//! x0_sign = mixed
//! urgency = as-written
//! ```
//!
//! Unknown sections or keys are rejected; graph paths are checked for
//! existence at parse time and resolved relative to the config file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSection {
    pub beta: f64,
    pub delta: f64,
    pub kp: f64,
    pub kx: f64,
    pub u0: f64,
    pub taux: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationSection {
    pub dt: f64,
    pub tend: f64,
    pub convergence_tol: f64,
    pub record_stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSection {
    pub seed: u64,
    pub samples: usize,
    pub runs: usize,
    pub p0: Option<f64>,
    pub x0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSection {
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

/// Where a graph comes from: a user file or a preset built into the binary.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Path(PathBuf),
    Embedded { name: &'static str, text: &'static str },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSection {
    pub contact: Option<GraphSource>,
    pub communication: Option<GraphSource>,
    pub x0_sign: String,
    pub urgency: String,
}

/// Fully resolved configuration for one command invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub command: &'static str,
    pub preset: Option<String>,
    pub model: ModelSection,
    pub integration: IntegrationSection,
    pub experiment: ExperimentSection,
    pub sweep: SweepSection,
    pub network: NetworkSection,
}

impl ResolvedConfig {
    pub fn defaults(command: &'static str) -> Self {
        Self {
            command,
            preset: None,
            model: ModelSection {
                beta: 0.75,
                delta: 0.3,
                kp: 0.7,
                kx: 0.3,
                u0: 0.7,
                taux: 1.0,
            },
            integration: IntegrationSection {
                dt: 0.01,
                tend: 500.0,
                convergence_tol: 1e-10,
                record_stride: 10,
            },
            experiment: ExperimentSection {
                seed: 42,
                samples: 100,
                runs: 1,
                p0: None,
                x0: None,
            },
            sweep: SweepSection {
                parameter: "beta".into(),
                min: 0.01,
                max: 0.99,
                points: 400,
            },
            network: NetworkSection {
                contact: None,
                communication: None,
                x0_sign: "mixed".into(),
                urgency: "as-written".into(),
            },
        }
    }

    pub fn model_params(&self) -> Result<nodsis::ModelParams, CliError> {
        nodsis::ModelParams::new(
            self.model.beta,
            self.model.delta,
            self.model.kp,
            self.model.kx,
            self.model.u0,
            self.model.taux,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn integration_config(&self) -> Result<nodsis::integrator::IntegrationConfig, CliError> {
        let cfg = nodsis::integrator::IntegrationConfig {
            dt: self.integration.dt,
            t_end: self.integration.tend,
            convergence_tol: self.integration.convergence_tol,
            record_stride: self.integration.record_stride,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Render the resolved state in the config-file format. Re-parsing this
    /// text reproduces the run.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command);
        if let Some(p) = &self.preset {
            let _ = writeln!(s, "preset = {p}");
        }
        let _ = writeln!(s, "[model]");
        let _ = writeln!(s, "beta = {}", self.model.beta);
        let _ = writeln!(s, "delta = {}", self.model.delta);
        let _ = writeln!(s, "kp = {}", self.model.kp);
        let _ = writeln!(s, "kx = {}", self.model.kx);
        let _ = writeln!(s, "u0 = {}", self.model.u0);
        let _ = writeln!(s, "taux = {}", self.model.taux);
        let _ = writeln!(s, "[integration]");
        let _ = writeln!(s, "dt = {}", self.integration.dt);
        let _ = writeln!(s, "tend = {}", self.integration.tend);
        let _ = writeln!(s, "convergence_tol = {}", self.integration.convergence_tol);
        let _ = writeln!(s, "record_stride = {}", self.integration.record_stride);
        let _ = writeln!(s, "[experiment]");
        let _ = writeln!(s, "seed = {}", self.experiment.seed);
        let _ = writeln!(s, "samples = {}", self.experiment.samples);
        let _ = writeln!(s, "runs = {}", self.experiment.runs);
        if let Some(p0) = self.experiment.p0 {
            let _ = writeln!(s, "p0 = {p0}");
        }
        if let Some(x0) = self.experiment.x0 {
            let _ = writeln!(s, "x0 = {x0}");
        }
        let _ = writeln!(s, "[sweep]");
        let _ = writeln!(s, "parameter = {}", self.sweep.parameter);
        let _ = writeln!(s, "min = {}", self.sweep.min);
        let _ = writeln!(s, "max = {}", self.sweep.max);
        let _ = writeln!(s, "points = {}", self.sweep.points);
        let _ = writeln!(s, "[network]");
        if let Some(GraphSource::Path(p)) = &self.network.contact {
            let _ = writeln!(s, "contact = {}", p.display());
        }
        if let Some(GraphSource::Path(p)) = &self.network.communication {
            let _ = writeln!(s, "communication = {}", p.display());
        }
        let _ = writeln!(s, "x0_sign = {}", self.network.x0_sign);
        let _ = writeln!(s, "urgency = {}", self.network.urgency);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Model,
    Integration,
    Experiment,
    Sweep,
    Network,
}

/// A parsed (not yet applied) config file.
pub struct ConfigFile {
    pub preset: Option<String>,
    entries: Vec<(Section, String, String, usize)>,
    base_dir: PathBuf,
}

/// Parse config text. `base_dir` anchors relative graph paths.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ConfigFile, CliError> {
    let mut section = Section::Top;
    let mut preset = None;
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| {
                CliError::Config(format!("line {line_no}: malformed section header {line:?}"))
            })?;
            section = match name.trim() {
                "model" => Section::Model,
                "integration" => Section::Integration,
                "experiment" => Section::Experiment,
                "sweep" => Section::Sweep,
                "network" => Section::Network,
                other => {
                    return Err(CliError::Config(format!(
                        "line {line_no}: unknown section [{other}]"
                    )))
                }
            };
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {line_no}: expected key = value, got {line:?}"))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if section == Section::Top {
            match key.as_str() {
                "preset" => {
                    preset = Some(value);
                    continue;
                }
                // Provenance line written back by the tool itself.
                "command" => continue,
                other => {
                    return Err(CliError::Config(format!(
                        "line {line_no}: unknown top-level key {other:?}"
                    )))
                }
            }
        }
        entries.push((section, key, value, line_no));
    }
    Ok(ConfigFile {
        preset,
        entries,
        base_dir: base_dir.to_path_buf(),
    })
}

fn parse_value<T: std::str::FromStr>(value: &str, key: &str, line: usize) -> Result<T, CliError> {
    value.parse().map_err(|_| {
        CliError::Config(format!("line {line}: invalid value {value:?} for key {key}"))
    })
}

impl ConfigFile {
    /// Apply the file's entries on top of `cfg`.
    pub fn apply(&self, cfg: &mut ResolvedConfig) -> Result<(), CliError> {
        for (section, key, value, line) in &self.entries {
            let (key, line) = (key.as_str(), *line);
            match section {
                Section::Top => unreachable!("top-level keys handled at parse time"),
                Section::Model => {
                    let v: f64 = parse_value(value, key, line)?;
                    match key {
                        "beta" => cfg.model.beta = v,
                        "delta" => cfg.model.delta = v,
                        "kp" => cfg.model.kp = v,
                        "kx" => cfg.model.kx = v,
                        "u0" => cfg.model.u0 = v,
                        "taux" => cfg.model.taux = v,
                        other => {
                            return Err(CliError::Config(format!(
                                "line {line}: unknown [model] key {other:?}"
                            )))
                        }
                    }
                }
                Section::Integration => match key {
                    "dt" => cfg.integration.dt = parse_value(value, key, line)?,
                    "tend" => cfg.integration.tend = parse_value(value, key, line)?,
                    "convergence_tol" => {
                        cfg.integration.convergence_tol = parse_value(value, key, line)?
                    }
                    "record_stride" => {
                        cfg.integration.record_stride = parse_value(value, key, line)?
                    }
                    other => {
                        return Err(CliError::Config(format!(
                            "line {line}: unknown [integration] key {other:?}"
                        )))
                    }
                },
                Section::Experiment => match key {
                    "seed" => cfg.experiment.seed = parse_value(value, key, line)?,
                    "samples" => cfg.experiment.samples = parse_value(value, key, line)?,
                    "runs" => cfg.experiment.runs = parse_value(value, key, line)?,
                    "p0" => cfg.experiment.p0 = Some(parse_value(value, key, line)?),
                    "x0" => cfg.experiment.x0 = Some(parse_value(value, key, line)?),
                    other => {
                        return Err(CliError::Config(format!(
                            "line {line}: unknown [experiment] key {other:?}"
                        )))
                    }
                },
                Section::Sweep => match key {
                    "parameter" => cfg.sweep.parameter = value.clone(),
                    "min" => cfg.sweep.min = parse_value(value, key, line)?,
                    "max" => cfg.sweep.max = parse_value(value, key, line)?,
                    "points" => cfg.sweep.points = parse_value(value, key, line)?,
                    other => {
                        return Err(CliError::Config(format!(
                            "line {line}: unknown [sweep] key {other:?}"
                        )))
                    }
                },
                Section::Network => match key {
                    "contact" => {
                        cfg.network.contact =
                            Some(resolve_graph_path(value, &self.base_dir, line)?)
                    }
                    "communication" => {
                        cfg.network.communication =
                            Some(resolve_graph_path(value, &self.base_dir, line)?)
                    }
                    "x0_sign" => cfg.network.x0_sign = value.clone(),
                    "urgency" => cfg.network.urgency = value.clone(),
                    other => {
                        return Err(CliError::Config(format!(
                            "line {line}: unknown [network] key {other:?}"
                        )))
                    }
                },
            }
        }
        Ok(())
    }
}

fn resolve_graph_path(value: &str, base_dir: &Path, line: usize) -> Result<GraphSource, CliError> {
    let raw = PathBuf::from(value);
    let joined = if raw.is_absolute() {
        raw
    } else {
        base_dir.join(raw)
    };
    let canonical = joined.canonicalize().map_err(|e| {
        CliError::Config(format!(
            "line {line}: graph file {} not readable: {e}",
            joined.display()
        ))
    })?;
    Ok(GraphSource::Path(canonical))
}

/// Check a graph path given on the command line.
pub fn graph_source_from_flag(path: &Path) -> Result<GraphSource, CliError> {
    let canonical = path.canonicalize().map_err(|e| {
        CliError::Config(format!("graph file {} not readable: {e}", path.display()))
    })?;
    Ok(GraphSource::Path(canonical))
}
