//! Structured-population model over a contact graph and a signed
//! communication graph, plus the standard network SIS baseline and
//! consensus/dissensus summaries.
//!
//! With `a_jk` the contact weights, `ahat_jk` the signed communication
//! weights, and per-node recovery rates `delta_j`:
//!
//! ```text
//! dp_j/dt       = beta_bar (1 + x_j)(1 - p_j) sum_k a_jk p_k - delta_j p_j
//! tau_x dx_j/dt = -x_j + tanh( u_j sum_k ahat_jk x_k )
//! u_j           = k_p (1/d_j) sum_k |ahat_jk| p_k + k_x sum_k ahat_jk x_j^2 + u0
//! d_j           = sum_k a_jk
//! ```
//!
//! The urgency expression mixes the two graphs (contact degree normalizing a
//! communication-weighted infection load) and squares the node's own opinion
//! inside a communication-weighted sum. Both choices admit alternative
//! readings; [`UrgencyVariant`] selects among them and defaults to the
//! formulas exactly as written above.

use std::fmt;
use std::path::Path;

use crate::error::Error;
use crate::integrator::{IntegrationConfig, CLAMP_TOL};
use crate::model::ModelParams;

/// Dense symmetric adjacency matrix with weighted, signed entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    n: usize,
    w: Vec<f64>,
}

impl Adjacency {
    /// Build from a row-major dense matrix; must be square and symmetric.
    pub fn from_dense(n: usize, w: Vec<f64>) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::GraphInvalid("graph needs at least one node".into()));
        }
        if w.len() != n * n {
            return Err(Error::GraphInvalid(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                w.len()
            )));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::GraphInvalid("non-finite edge weight".into()));
        }
        for j in 0..n {
            for k in (j + 1)..n {
                if w[j * n + k] != w[k * n + j] {
                    return Err(Error::GraphInvalid(format!(
                        "asymmetric weights between nodes {j} and {k}"
                    )));
                }
            }
        }
        Ok(Self { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.w[j * self.n + k]
    }

    pub fn row_sum(&self, j: usize) -> f64 {
        (0..self.n).map(|k| self.get(j, k)).sum()
    }

    pub fn row_abs_sum(&self, j: usize) -> f64 {
        (0..self.n).map(|k| self.get(j, k).abs()).sum()
    }

    /// Connected when sign is ignored (off-diagonal nonzero entries form one
    /// component).
    pub fn connected_ignoring_sign(&self) -> bool {
        let mut visited = vec![false; self.n];
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(j) = stack.pop() {
            for k in 0..self.n {
                if k != j && !visited[k] && self.get(j, k) != 0.0 {
                    visited[k] = true;
                    stack.push(k);
                }
            }
        }
        visited.into_iter().all(|v| v)
    }
}

/// Parse a plain-text edge list:
///
/// ```text
/// n=<count>
/// j k w
/// ```
///
/// Node ids are 0-indexed; weights are signed. Self-loops default to weight
/// 1 unless a `j j w` line overrides them. Blank lines and `#` comments are
/// skipped. Listing both `j k w` and `k j w'` with `w != w'` is a conflict
/// and is rejected.
pub fn parse_graph(text: &str) -> Result<Adjacency, Error> {
    let mut n: Option<usize> = None;
    let mut entries: Vec<(usize, usize, f64, usize)> = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let line_no = line_no + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if n.is_none() {
            let rest = line.strip_prefix("n=").ok_or_else(|| Error::GraphParse {
                line: line_no,
                msg: format!("expected header n=<count>, got {line:?}"),
            })?;
            let count: usize = rest.trim().parse().map_err(|_| Error::GraphParse {
                line: line_no,
                msg: format!("invalid node count {rest:?}"),
            })?;
            if count == 0 {
                return Err(Error::GraphParse {
                    line: line_no,
                    msg: "node count must be >= 1".into(),
                });
            }
            n = Some(count);
            continue;
        }
        let n_val = n.unwrap();
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::GraphParse {
                line: line_no,
                msg: format!("expected `j k w`, got {line:?}"),
            });
        }
        let j: usize = fields[0].parse().map_err(|_| Error::GraphParse {
            line: line_no,
            msg: format!("invalid node id {:?}", fields[0]),
        })?;
        let k: usize = fields[1].parse().map_err(|_| Error::GraphParse {
            line: line_no,
            msg: format!("invalid node id {:?}", fields[1]),
        })?;
        let w: f64 = fields[2].parse().map_err(|_| Error::GraphParse {
            line: line_no,
            msg: format!("invalid weight {:?}", fields[2]),
        })?;
        if j >= n_val || k >= n_val {
            return Err(Error::GraphParse {
                line: line_no,
                msg: format!("node id out of range 0..{n_val}"),
            });
        }
        if !w.is_finite() {
            return Err(Error::GraphParse {
                line: line_no,
                msg: "edge weight must be finite".into(),
            });
        }
        entries.push((j, k, w, line_no));
    }
    let n = n.ok_or(Error::GraphParse {
        line: 0,
        msg: "missing n=<count> header".into(),
    })?;

    let mut w = vec![0.0; n * n];
    let mut set: Vec<Option<usize>> = vec![None; n * n]; // line that fixed each entry
    for (j, k, weight, line_no) in entries {
        let (a, b) = (j.min(k), j.max(k));
        let idx = a * n + b;
        if let Some(prev_line) = set[idx] {
            if w[idx] != weight {
                return Err(Error::GraphParse {
                    line: line_no,
                    msg: format!(
                        "edge ({j}, {k}) weight {weight} conflicts with line {prev_line}"
                    ),
                });
            }
        } else {
            set[idx] = Some(line_no);
            w[idx] = weight;
            w[b * n + a] = weight;
        }
    }
    for j in 0..n {
        if set[j * n + j].is_none() {
            w[j * n + j] = 1.0; // implied self-loop
        }
    }
    Adjacency::from_dense(n, w)
}

/// Read and parse an edge-list file.
pub fn load_graph(path: &Path) -> Result<Adjacency, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::GraphInvalid(format!(
        "cannot read {}: {e}",
        path.display()
    )))?;
    parse_graph(&text)
}

/// How the per-node urgency resolves the two ambiguous terms of its
/// definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UrgencyVariant {
    /// Normalize the infection load by the contact degree and square the
    /// node's own opinion (the formulas as printed in the module docs).
    #[default]
    AsWritten,
    /// Normalize the infection load by the communication degree
    /// `sum_k |ahat_jk|` instead of the contact degree.
    CommunicationDegree,
    /// Square the neighbours' opinions (`sum_k ahat_jk x_k^2`) in the
    /// peer-pressure term instead of the node's own.
    NeighborOpinions,
}

impl fmt::Display for UrgencyVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UrgencyVariant::AsWritten => "as-written",
            UrgencyVariant::CommunicationDegree => "communication-degree",
            UrgencyVariant::NeighborOpinions => "neighbor-opinions",
        })
    }
}

impl std::str::FromStr for UrgencyVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "as-written" | "printed" => Ok(UrgencyVariant::AsWritten),
            "communication-degree" => Ok(UrgencyVariant::CommunicationDegree),
            "neighbor-opinions" => Ok(UrgencyVariant::NeighborOpinions),
            other => Err(format!("unknown urgency variant {other:?}")),
        }
    }
}

/// N coupled subpopulations: a non-negative contact graph, a signed
/// communication graph, per-node recovery rates, and the shared scalar
/// parameters.
///
/// Both graphs must be symmetric and connected (ignoring sign for the
/// communication graph) with unit self-loops. Immutable after construction.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    contact: Adjacency,
    communication: Adjacency,
    deltas: Vec<f64>,
    params: ModelParams,
    urgency_variant: UrgencyVariant,
}

impl NetworkModel {
    pub fn new(
        contact: Adjacency,
        communication: Adjacency,
        deltas: Vec<f64>,
        params: ModelParams,
        urgency_variant: UrgencyVariant,
    ) -> Result<Self, Error> {
        let n = contact.n();
        if communication.n() != n {
            return Err(Error::GraphInvalid(format!(
                "contact graph has {n} nodes but communication graph has {}",
                communication.n()
            )));
        }
        if deltas.len() != n {
            return Err(Error::GraphInvalid(format!(
                "expected {n} recovery rates, got {}",
                deltas.len()
            )));
        }
        if deltas.iter().any(|d| !d.is_finite() || *d <= 0.0) {
            return Err(Error::GraphInvalid("recovery rates must be > 0".into()));
        }
        for j in 0..n {
            if contact.get(j, j) != 1.0 {
                return Err(Error::GraphInvalid(format!(
                    "contact self-loop at node {j} must be 1 (got {})",
                    contact.get(j, j)
                )));
            }
            if communication.get(j, j) != 1.0 {
                return Err(Error::GraphInvalid(format!(
                    "communication self-loop at node {j} must be 1 (got {})",
                    communication.get(j, j)
                )));
            }
            for k in 0..n {
                if contact.get(j, k) < 0.0 {
                    return Err(Error::GraphInvalid(format!(
                        "contact weight ({j}, {k}) must be >= 0"
                    )));
                }
            }
        }
        if !contact.connected_ignoring_sign() {
            return Err(Error::GraphInvalid("contact graph is disconnected".into()));
        }
        if !communication.connected_ignoring_sign() {
            return Err(Error::GraphInvalid(
                "communication graph is disconnected (ignoring sign)".into(),
            ));
        }
        Ok(Self {
            contact,
            communication,
            deltas,
            params,
            urgency_variant,
        })
    }

    /// Model with every node recovering at the shared scalar rate.
    pub fn with_uniform_delta(
        contact: Adjacency,
        communication: Adjacency,
        params: ModelParams,
        urgency_variant: UrgencyVariant,
    ) -> Result<Self, Error> {
        let n = contact.n();
        Self::new(
            contact,
            communication,
            vec![params.delta(); n],
            params,
            urgency_variant,
        )
    }

    pub fn n(&self) -> usize {
        self.contact.n()
    }

    pub fn contact(&self) -> &Adjacency {
        &self.contact
    }

    pub fn communication(&self) -> &Adjacency {
        &self.communication
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn urgency_variant(&self) -> UrgencyVariant {
        self.urgency_variant
    }

    /// Net urgency at node `j`.
    fn node_urgency(&self, j: usize, p: &[f64], x: &[f64]) -> f64 {
        let n = self.n();
        let degree = match self.urgency_variant {
            UrgencyVariant::AsWritten | UrgencyVariant::NeighborOpinions => self.contact.row_sum(j),
            UrgencyVariant::CommunicationDegree => self.communication.row_abs_sum(j),
        };
        let mut load = 0.0;
        for k in 0..n {
            load += self.communication.get(j, k).abs() * p[k];
        }
        let mut pressure = 0.0;
        match self.urgency_variant {
            UrgencyVariant::AsWritten | UrgencyVariant::CommunicationDegree => {
                for k in 0..n {
                    pressure += self.communication.get(j, k) * (x[j] * x[j]);
                }
            }
            UrgencyVariant::NeighborOpinions => {
                for k in 0..n {
                    pressure += self.communication.get(j, k) * (x[k] * x[k]);
                }
            }
        }
        // Term order mirrors the scalar urgency so the single-node model
        // reduces exactly.
        self.params.k_p() * (load / degree) + self.params.k_x() * pressure + self.params.u0()
    }
}

/// Per-node infection and opinion levels, componentwise inside the trapping
/// region.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    p: Vec<f64>,
    x: Vec<f64>,
}

impl NetworkState {
    pub fn new(p: Vec<f64>, x: Vec<f64>) -> Result<Self, Error> {
        if p.len() != x.len() {
            return Err(Error::InvalidNetworkState(format!(
                "{} infection levels but {} opinions",
                p.len(),
                x.len()
            )));
        }
        if p.is_empty() {
            return Err(Error::InvalidNetworkState("empty state".into()));
        }
        for (j, v) in p.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(v) {
                return Err(Error::InvalidNetworkState(format!(
                    "infection level p[{j}] = {v} outside [0, 1]"
                )));
            }
        }
        for (j, v) in x.iter().enumerate() {
            if !v.is_finite() || !(-1.0..=1.0).contains(v) {
                return Err(Error::InvalidNetworkState(format!(
                    "opinion x[{j}] = {v} outside [-1, 1]"
                )));
            }
        }
        Ok(Self { p, x })
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }
}

fn field_raw(p: &[f64], x: &[f64], m: &NetworkModel, dp: &mut [f64], dx: &mut [f64]) {
    let n = m.n();
    for j in 0..n {
        let mut contact_load = 0.0;
        for k in 0..n {
            contact_load += m.contact.get(j, k) * p[k];
        }
        dp[j] = m.params.beta_bar() * (1.0 + x[j]) * (1.0 - p[j]) * contact_load
            - m.deltas[j] * p[j];
        let u = m.node_urgency(j, p, x);
        let mut comm = 0.0;
        for k in 0..n {
            comm += m.communication.get(j, k) * x[k];
        }
        dx[j] = (-x[j] + (u * comm).tanh()) / m.params.tau_x();
    }
}

/// Right-hand side of the networked model.
pub fn network_vector_field(s: &NetworkState, m: &NetworkModel) -> Result<(Vec<f64>, Vec<f64>), Error> {
    if s.n() != m.n() {
        return Err(Error::InvalidNetworkState(format!(
            "state has {} nodes, model has {}",
            s.n(),
            m.n()
        )));
    }
    let mut dp = vec![0.0; m.n()];
    let mut dx = vec![0.0; m.n()];
    field_raw(s.p(), s.x(), m, &mut dp, &mut dx);
    Ok((dp, dx))
}

/// A recorded networked trajectory. Keeps the integration config so
/// downstream comparisons can rerun the baseline under identical settings.
#[derive(Debug, Clone)]
pub struct NetworkTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<NetworkState>,
    pub converged: bool,
    pub max_excursion: f64,
    pub config: IntegrationConfig,
}

impl NetworkTrajectory {
    pub fn final_state(&self) -> &NetworkState {
        self.states.last().expect("trajectory carries >= 1 state")
    }
}

fn max_norm(dp: &[f64], dx: &[f64]) -> f64 {
    dp.iter()
        .chain(dx.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

fn rk4_vec_step(
    p: &mut [f64],
    x: &mut [f64],
    dt: f64,
    m: &NetworkModel,
    scratch: &mut RkScratch,
) {
    let n = p.len();
    field_raw(p, x, m, &mut scratch.k1p, &mut scratch.k1x);
    for j in 0..n {
        scratch.tp[j] = p[j] + 0.5 * dt * scratch.k1p[j];
        scratch.tx[j] = x[j] + 0.5 * dt * scratch.k1x[j];
    }
    field_raw(&scratch.tp, &scratch.tx, m, &mut scratch.k2p, &mut scratch.k2x);
    for j in 0..n {
        scratch.tp[j] = p[j] + 0.5 * dt * scratch.k2p[j];
        scratch.tx[j] = x[j] + 0.5 * dt * scratch.k2x[j];
    }
    field_raw(&scratch.tp, &scratch.tx, m, &mut scratch.k3p, &mut scratch.k3x);
    for j in 0..n {
        scratch.tp[j] = p[j] + dt * scratch.k3p[j];
        scratch.tx[j] = x[j] + dt * scratch.k3x[j];
    }
    field_raw(&scratch.tp, &scratch.tx, m, &mut scratch.k4p, &mut scratch.k4x);
    for j in 0..n {
        p[j] += (dt / 6.0)
            * (scratch.k1p[j] + 2.0 * scratch.k2p[j] + 2.0 * scratch.k3p[j] + scratch.k4p[j]);
        x[j] += (dt / 6.0)
            * (scratch.k1x[j] + 2.0 * scratch.k2x[j] + 2.0 * scratch.k3x[j] + scratch.k4x[j]);
    }
}

struct RkScratch {
    k1p: Vec<f64>,
    k1x: Vec<f64>,
    k2p: Vec<f64>,
    k2x: Vec<f64>,
    k3p: Vec<f64>,
    k3x: Vec<f64>,
    k4p: Vec<f64>,
    k4x: Vec<f64>,
    tp: Vec<f64>,
    tx: Vec<f64>,
}

impl RkScratch {
    fn new(n: usize) -> Self {
        Self {
            k1p: vec![0.0; n],
            k1x: vec![0.0; n],
            k2p: vec![0.0; n],
            k2x: vec![0.0; n],
            k3p: vec![0.0; n],
            k3x: vec![0.0; n],
            k4p: vec![0.0; n],
            k4x: vec![0.0; n],
            tp: vec![0.0; n],
            tx: vec![0.0; n],
        }
    }
}

/// Integrate the networked model: fixed-step RK4 with componentwise boundary
/// clamping and max-norm convergence detection, matching the scalar
/// integrator's behavior per component.
pub fn network_integrate(
    s0: &NetworkState,
    m: &NetworkModel,
    cfg: &IntegrationConfig,
) -> Result<NetworkTrajectory, Error> {
    cfg.validate()?;
    if s0.n() != m.n() {
        return Err(Error::InvalidNetworkState(format!(
            "state has {} nodes, model has {}",
            s0.n(),
            m.n()
        )));
    }
    let n = m.n();
    let n_steps = (cfg.t_end / cfg.dt).ceil() as usize;
    let mut p = s0.p().to_vec();
    let mut x = s0.x().to_vec();
    let mut dp = vec![0.0; n];
    let mut dx = vec![0.0; n];
    let mut scratch = RkScratch::new(n);
    let mut times = vec![0.0];
    let mut states = vec![s0.clone()];
    let mut last_recorded_step = 0usize;
    let mut max_excursion = 0.0f64;
    let mut converged = false;
    let mut step = 0usize;

    loop {
        field_raw(&p, &x, m, &mut dp, &mut dx);
        if max_norm(&dp, &dx) < cfg.convergence_tol {
            converged = true;
            break;
        }
        if step >= n_steps {
            break;
        }
        rk4_vec_step(&mut p, &mut x, cfg.dt, m, &mut scratch);
        step += 1;
        let mut exc = 0.0f64;
        for j in 0..n {
            exc = exc.max((0.0 - p[j]).max(p[j] - 1.0).max(0.0));
            exc = exc.max((-1.0 - x[j]).max(x[j] - 1.0).max(0.0));
        }
        if exc > CLAMP_TOL {
            return Err(Error::InvarianceViolation {
                t: step as f64 * cfg.dt,
                excursion: exc,
                tol: CLAMP_TOL,
            });
        }
        max_excursion = max_excursion.max(exc);
        for j in 0..n {
            p[j] = p[j].clamp(0.0, 1.0);
            x[j] = x[j].clamp(-1.0, 1.0);
        }
        if step % cfg.record_stride == 0 {
            times.push(step as f64 * cfg.dt);
            states.push(NetworkState::new(p.clone(), x.clone())?);
            last_recorded_step = step;
        }
    }
    if step > last_recorded_step {
        times.push(step as f64 * cfg.dt);
        states.push(NetworkState::new(p, x)?);
    }
    Ok(NetworkTrajectory {
        times,
        states,
        converged,
        max_excursion,
        config: *cfg,
    })
}

/// Standard network SIS trajectory (the opinion-free baseline).
#[derive(Debug, Clone)]
pub struct SisBaseline {
    pub times: Vec<f64>,
    /// Per-sample infection vectors.
    pub p: Vec<Vec<f64>>,
    pub converged: bool,
    /// Final infection vector (the steady state when `converged`).
    pub steady: Vec<f64>,
}

/// Integrate `dp_j/dt = beta_bar (1 - p_j) sum_k a_jk p_k - delta_j p_j`
/// from `p0`, i.e. the networked model frozen at neutral opinions.
pub fn network_sis_baseline(
    p0: &[f64],
    m: &NetworkModel,
    cfg: &IntegrationConfig,
) -> Result<SisBaseline, Error> {
    cfg.validate()?;
    let n = m.n();
    if p0.len() != n {
        return Err(Error::InvalidNetworkState(format!(
            "initial vector has {} nodes, model has {n}",
            p0.len()
        )));
    }
    for (j, v) in p0.iter().enumerate() {
        if !v.is_finite() || !(0.0..=1.0).contains(v) {
            return Err(Error::InvalidNetworkState(format!(
                "infection level p[{j}] = {v} outside [0, 1]"
            )));
        }
    }

    let field = |p: &[f64], dp: &mut [f64]| {
        for j in 0..n {
            let mut load = 0.0;
            for k in 0..n {
                load += m.contact.get(j, k) * p[k];
            }
            dp[j] = m.params.beta_bar() * (1.0 - p[j]) * load - m.deltas[j] * p[j];
        }
    };

    let n_steps = (cfg.t_end / cfg.dt).ceil() as usize;
    let mut p = p0.to_vec();
    let mut dp = vec![0.0; n];
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut times = vec![0.0];
    let mut samples = vec![p.clone()];
    let mut last_recorded_step = 0usize;
    let mut converged = false;
    let mut step = 0usize;

    loop {
        field(&p, &mut dp);
        if dp.iter().fold(0.0f64, |m, v| m.max(v.abs())) < cfg.convergence_tol {
            converged = true;
            break;
        }
        if step >= n_steps {
            break;
        }
        field(&p, &mut k1);
        for j in 0..n {
            tmp[j] = p[j] + 0.5 * cfg.dt * k1[j];
        }
        field(&tmp, &mut k2);
        for j in 0..n {
            tmp[j] = p[j] + 0.5 * cfg.dt * k2[j];
        }
        field(&tmp, &mut k3);
        for j in 0..n {
            tmp[j] = p[j] + cfg.dt * k3[j];
        }
        field(&tmp, &mut k4);
        for j in 0..n {
            p[j] += (cfg.dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            p[j] = p[j].clamp(0.0, 1.0);
        }
        step += 1;
        if step % cfg.record_stride == 0 {
            times.push(step as f64 * cfg.dt);
            samples.push(p.clone());
            last_recorded_step = step;
        }
    }
    if step > last_recorded_step {
        times.push(step as f64 * cfg.dt);
        samples.push(p.clone());
    }
    Ok(SisBaseline {
        times,
        p: samples,
        converged,
        steady: p,
    })
}

/// How the steady-state opinions relate across nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsensusOutcome {
    /// All (nonzero) steady opinions negative.
    AgreementAverse,
    /// All (nonzero) steady opinions positive.
    AgreementSeeking,
    /// Both signs present.
    Dissensus,
}

impl fmt::Display for ConsensusOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConsensusOutcome::AgreementAverse => "AGREEMENT_AVERSE",
            ConsensusOutcome::AgreementSeeking => "AGREEMENT_SEEKING",
            ConsensusOutcome::Dissensus => "DISSENSUS",
        })
    }
}

/// Steady-state sign pattern and the per-node comparison against the plain
/// network SIS baseline.
#[derive(Debug, Clone)]
pub struct ConsensusReport {
    /// Sign of each node's steady opinion (-1, 0, +1 with a 1e-8 zero band).
    pub sign_pattern: Vec<i8>,
    pub outcome: ConsensusOutcome,
    /// Final infection level minus the baseline steady state, per node; the
    /// baseline is rerun from this trajectory's own initial infection vector
    /// under the same integration settings.
    pub infection_vs_baseline: Vec<f64>,
}

/// Classify a converged networked trajectory.
pub fn consensus_report(traj: &NetworkTrajectory, m: &NetworkModel) -> Result<ConsensusReport, Error> {
    if !traj.converged {
        return Err(Error::NonConvergent);
    }
    let final_state = traj.final_state();
    let sign_pattern: Vec<i8> = final_state
        .x()
        .iter()
        .map(|&x| {
            if x > 1e-8 {
                1
            } else if x < -1e-8 {
                -1
            } else {
                0
            }
        })
        .collect();
    let any_pos = sign_pattern.iter().any(|&s| s > 0);
    let any_neg = sign_pattern.iter().any(|&s| s < 0);
    let outcome = match (any_pos, any_neg) {
        (true, true) => ConsensusOutcome::Dissensus,
        (true, false) => ConsensusOutcome::AgreementSeeking,
        (false, true) => ConsensusOutcome::AgreementAverse,
        (false, false) => {
            return Err(Error::ConsensusUndefined(
                "every steady opinion is neutral".into(),
            ))
        }
    };
    let baseline = network_sis_baseline(traj.states[0].p(), m, &traj.config)?;
    if !baseline.converged {
        return Err(Error::NonConvergent);
    }
    let infection_vs_baseline = final_state
        .p()
        .iter()
        .zip(&baseline.steady)
        .map(|(a, b)| a - b)
        .collect();
    Ok(ConsensusReport {
        sign_pattern,
        outcome,
        infection_vs_baseline,
    })
}
