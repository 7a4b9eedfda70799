//! The five subcommands, each mapping a resolved config onto library calls
//! and flattening the results into CSV tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nodsis::bifurcation::{export_diagram, sweep, SweepConfig, SweepParameter};
use nodsis::equilibria::{find_equilibria, regime};
use nodsis::integrator::{basin_experiment, integrate_with_equilibria, RNG_ALGORITHM};
use nodsis::network::{
    consensus_report, load_graph, network_integrate, parse_graph, Adjacency, NetworkModel,
    NetworkState, UrgencyVariant,
};
use nodsis::{Error, State};

use crate::config::{GraphSource, ResolvedConfig};
use crate::output::{csv_f64, CommandOutput, Table};
use crate::CliError;

fn lib_err(e: Error) -> CliError {
    CliError::Lib(e)
}

/// Draw a state uniformly over the interior of the trapping region.
fn draw_interior(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let p: f64 = rng.gen();
        let x: f64 = rng.gen_range(-1.0..1.0);
        if p > 0.0 && p < 1.0 && x != 0.0 && x > -1.0 {
            return (p, x);
        }
    }
}

pub fn run_simulate(cfg: &ResolvedConfig) -> Result<CommandOutput, CliError> {
    let params = cfg.model_params()?;
    let int_cfg = cfg.integration_config()?;
    let equilibria = find_equilibria(&params);

    let mut meta: Vec<(String, String)> = Vec::new();
    let runs = cfg.experiment.runs.max(1);
    let initials: Vec<(f64, f64)> = if runs == 1 {
        vec![(
            cfg.experiment.p0.unwrap_or(0.1),
            cfg.experiment.x0.unwrap_or(0.1),
        )]
    } else {
        meta.push(("rng".into(), RNG_ALGORITHM.into()));
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.experiment.seed);
        (0..runs).map(|_| draw_interior(&mut rng)).collect()
    };

    let mut rows = Vec::new();
    for (run, (p0, x0)) in initials.iter().enumerate() {
        let s0 = State::new(*p0, *x0)
            .map_err(|e| CliError::Config(format!("initial state: {e}")))?;
        let traj =
            integrate_with_equilibria(s0, &params, &int_cfg, &equilibria).map_err(lib_err)?;
        let limit = traj
            .limit
            .as_ref()
            .map(|eq| eq.class.to_string())
            .unwrap_or_else(|| "none".into());
        meta.push((
            format!("run-{run}"),
            format!(
                "p0={p0} x0={x0} converged={} limit={limit}",
                traj.converged
            ),
        ));
        for (t, s) in traj.times.iter().zip(&traj.states) {
            if runs == 1 {
                rows.push(format!(
                    "{},{},{}",
                    csv_f64(*t),
                    csv_f64(s.p()),
                    csv_f64(s.x())
                ));
            } else {
                rows.push(format!(
                    "{run},{},{},{}",
                    csv_f64(*t),
                    csv_f64(s.p()),
                    csv_f64(s.x())
                ));
            }
        }
    }
    let table = if runs == 1 {
        Table {
            name: "trajectory",
            header: "t,p,x",
            rows,
        }
    } else {
        Table {
            name: "trajectory",
            header: "run,t,p,x",
            rows,
        }
    };
    Ok(CommandOutput {
        meta,
        tables: vec![table],
    })
}

pub fn run_equilibria(cfg: &ResolvedConfig) -> Result<CommandOutput, CliError> {
    let params = cfg.model_params()?;
    let equilibria = find_equilibria(&params);

    let mut meta: Vec<(String, String)> = vec![(
        "assumption1".into(),
        params.assumption1_holds().to_string(),
    )];
    match regime(&params) {
        Ok(report) => {
            meta.push(("regime".into(), report.regime.to_string()));
            meta.push(("threshold-delta".into(), report.delta.to_string()));
            meta.push(("threshold-beta-star".into(), report.beta_star.to_string()));
            meta.push((
                "threshold-beta-0".into(),
                report
                    .beta_0
                    .map(|b| b.to_string())
                    .unwrap_or_else(|| "none".into()),
            ));
        }
        Err(
            e @ (Error::AssumptionViolated(_)
            | Error::RegimeMismatch(_)
            | Error::NearBifurcation(_)
            | Error::ThresholdUndefined { .. }),
        ) => {
            meta.push(("warning".into(), e.to_string()));
        }
        Err(e) => return Err(lib_err(e)),
    }

    let rows = equilibria
        .iter()
        .map(|eq| {
            format!(
                "{},{},{},{},{},{},{},{},{}",
                eq.class,
                csv_f64(eq.state.p()),
                csv_f64(eq.state.x()),
                csv_f64(eq.eigenvalues[0].re),
                csv_f64(eq.eigenvalues[0].im),
                csv_f64(eq.eigenvalues[1].re),
                csv_f64(eq.eigenvalues[1].im),
                eq.stability,
                csv_f64(eq.residual)
            )
        })
        .collect();
    Ok(CommandOutput {
        meta,
        tables: vec![Table {
            name: "equilibria",
            header: "class,p,x,eig1_re,eig1_im,eig2_re,eig2_im,stability,residual",
            rows,
        }],
    })
}

pub fn run_bifurcate(cfg: &ResolvedConfig) -> Result<CommandOutput, CliError> {
    let params = cfg.model_params()?;
    let parameter: SweepParameter = cfg
        .sweep
        .parameter
        .parse()
        .map_err(|e: String| CliError::Config(e))?;
    let sweep_cfg = SweepConfig::uniform(
        parameter,
        cfg.sweep.min,
        cfg.sweep.max,
        cfg.sweep.points,
        params,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let diagram = sweep(&sweep_cfg).map_err(lib_err)?;
    let (records, events) = export_diagram(&diagram);

    let meta = vec![
        ("branches".into(), diagram.branches.len().to_string()),
        ("events".into(), events.len().to_string()),
    ];
    let point_rows = records
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                csv_f64(r.parameter),
                r.class,
                csv_f64(r.p),
                csv_f64(r.x),
                r.stability
            )
        })
        .collect();
    let event_rows = events
        .iter()
        .map(|e| {
            format!(
                "{},{},{},{}",
                csv_f64(e.parameter),
                e.kind,
                e.classes[0],
                e.classes[1]
            )
        })
        .collect();
    Ok(CommandOutput {
        meta,
        tables: vec![
            Table {
                name: "diagram",
                header: "parameter,class,p,x,stability",
                rows: point_rows,
            },
            Table {
                name: "events",
                header: "parameter,kind,class_a,class_b",
                rows: event_rows,
            },
        ],
    })
}

pub fn run_basin(cfg: &ResolvedConfig) -> Result<CommandOutput, CliError> {
    let params = cfg.model_params()?;
    let int_cfg = cfg.integration_config()?;
    let samples = basin_experiment(&params, cfg.experiment.samples, cfg.experiment.seed, &int_cfg)
        .map_err(lib_err)?;

    let mut counts: std::collections::BTreeMap<String, usize> = std::collections::BTreeMap::new();
    for s in &samples {
        let key = s
            .limit_class
            .map(|c| c.to_string())
            .unwrap_or_else(|| "none".into());
        *counts.entry(key).or_insert(0) += 1;
    }
    let mut meta: Vec<(String, String)> = vec![("rng".into(), RNG_ALGORITHM.into())];
    for (class, count) in &counts {
        meta.push((format!("count-{class}"), count.to_string()));
    }

    let rows = samples
        .iter()
        .map(|s| {
            format!(
                "{},{},{},{},{}",
                s.index,
                csv_f64(s.initial.p()),
                csv_f64(s.initial.x()),
                s.converged,
                s.limit_class
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "none".into())
            )
        })
        .collect();
    Ok(CommandOutput {
        meta,
        tables: vec![Table {
            name: "basin",
            header: "sample,p0,x0,converged,limit_class",
            rows,
        }],
    })
}

fn load_graph_source(source: &GraphSource) -> Result<Adjacency, CliError> {
    match source {
        GraphSource::Path(path) => load_graph(path).map_err(|e| CliError::Config(e.to_string())),
        GraphSource::Embedded { text, .. } => {
            parse_graph(text).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

pub fn run_network(cfg: &ResolvedConfig) -> Result<CommandOutput, CliError> {
    let params = cfg.model_params()?;
    let int_cfg = cfg.integration_config()?;
    let contact = load_graph_source(cfg.network.contact.as_ref().ok_or_else(|| {
        CliError::Config("network runs need a contact graph (--contact, config, or preset)".into())
    })?)?;
    let communication = load_graph_source(cfg.network.communication.as_ref().ok_or_else(|| {
        CliError::Config(
            "network runs need a communication graph (--communication, config, or preset)".into(),
        )
    })?)?;
    let urgency: UrgencyVariant = cfg
        .network
        .urgency
        .parse()
        .map_err(|e: String| CliError::Config(e))?;
    let model = NetworkModel::with_uniform_delta(contact, communication, params, urgency)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let n = model.n();

    let mut meta: Vec<(String, String)> = vec![("nodes".into(), n.to_string())];
    let (p0, x0) = initial_network_state(cfg, n, &mut meta)?;
    let s0 = NetworkState::new(p0, x0).map_err(|e| CliError::Config(e.to_string()))?;
    let traj = network_integrate(&s0, &model, &int_cfg).map_err(lib_err)?;
    let report = consensus_report(&traj, &model).map_err(lib_err)?;

    meta.push(("converged".into(), traj.converged.to_string()));
    meta.push(("outcome".into(), report.outcome.to_string()));

    let mut rows = Vec::with_capacity(traj.times.len() * n);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        for j in 0..n {
            rows.push(format!(
                "{},{j},{},{}",
                csv_f64(*t),
                csv_f64(s.p()[j]),
                csv_f64(s.x()[j])
            ));
        }
    }
    let final_state = traj.final_state();
    let consensus_rows = (0..n)
        .map(|j| {
            let p_final = final_state.p()[j];
            let diff = report.infection_vs_baseline[j];
            format!(
                "{j},{},{},{},{},{}",
                csv_f64(final_state.x()[j]),
                report.sign_pattern[j],
                csv_f64(p_final),
                csv_f64(p_final - diff),
                csv_f64(diff)
            )
        })
        .collect();

    Ok(CommandOutput {
        meta,
        tables: vec![
            Table {
                name: "trajectory",
                header: "t,node,p,x",
                rows,
            },
            Table {
                name: "consensus",
                header: "node,x_final,sign,p_final,p_baseline,difference",
                rows: consensus_rows,
            },
        ],
    })
}

/// Per-node initial conditions: explicit uniform values when `p0`/`x0` are
/// set, otherwise seeded draws with the configured opinion-sign pattern.
fn initial_network_state(
    cfg: &ResolvedConfig,
    n: usize,
    meta: &mut Vec<(String, String)>,
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let explicit = cfg.experiment.p0.is_some() || cfg.experiment.x0.is_some();
    if explicit {
        let p0 = cfg.experiment.p0.unwrap_or(0.1);
        let x0 = cfg.experiment.x0.unwrap_or(0.1);
        meta.push(("initial".into(), format!("uniform p0={p0} x0={x0}")));
        return Ok((vec![p0; n], vec![x0; n]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.experiment.seed);
    meta.push(("rng".into(), RNG_ALGORITHM.into()));
    let p0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.2)).collect();
    let x0: Vec<f64> = match cfg.network.x0_sign.as_str() {
        "neg" => (0..n).map(|_| -rng.gen_range(0.1..0.5)).collect(),
        "pos" => (0..n).map(|_| rng.gen_range(0.1..0.5)).collect(),
        "mixed" => (0..n)
            .map(|_| loop {
                let x: f64 = rng.gen_range(-0.4..0.4);
                if x.abs() >= 1e-3 {
                    break x;
                }
            })
            .collect(),
        other => {
            return Err(CliError::Config(format!(
                "x0_sign must be neg, pos, or mixed (got {other:?})"
            )))
        }
    };
    meta.push(("x0-sign".into(), cfg.network.x0_sign.clone()));
    Ok((p0, x0))
}
