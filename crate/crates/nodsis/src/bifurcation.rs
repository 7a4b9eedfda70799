//! Single-parameter sweeps assembling bifurcation diagrams: equilibrium
//! branches with stability flags plus detected transcritical and fold
//! events.
//!
//! Branches are assembled from a dense parameter grid by class-preserving
//! nearest-neighbor linking; every branch here is a graph over the swept
//! parameter, so grid linking is adequate and no arclength continuation is
//! needed. Detected events are refined past grid resolution by bisecting the
//! relevant scalar condition: the critical eigenvalue for a transcritical
//! exchange, the minimum of the nullcline gap for a fold.

use std::collections::HashSet;
use std::fmt;

use crate::equilibria::{find_equilibria, Equilibrium, EquilibriumClass, Stability};
use crate::error::Error;
use crate::model::{nullcline_gap_scaled, ModelParams, State, X_DOMAIN_MARGIN};
use crate::numerics::{bisect, grid_min};

/// Largest (p, x) move a branch may take across one grid step.
const JUMP_TOL: f64 = 0.05;
/// How close two branches must come for a stability exchange between them to
/// count as one transcritical event.
const PARTNER_TOL: f64 = 0.1;
/// How close two simultaneously appearing branches must start to count as a
/// fold pair.
const FOLD_PAIR_TOL: f64 = 0.25;
/// Bisection width for event refinement.
const EVENT_REFINE_TOL: f64 = 1e-8;

/// Which scalar parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    BetaBar,
    Delta,
    KP,
    KX,
    U0,
    TauX,
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::BetaBar => "beta",
            SweepParameter::Delta => "delta",
            SweepParameter::KP => "kp",
            SweepParameter::KX => "kx",
            SweepParameter::U0 => "u0",
            SweepParameter::TauX => "taux",
        })
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "beta" | "beta_bar" => Ok(SweepParameter::BetaBar),
            "delta" => Ok(SweepParameter::Delta),
            "kp" | "k_p" => Ok(SweepParameter::KP),
            "kx" | "k_x" => Ok(SweepParameter::KX),
            "u0" => Ok(SweepParameter::U0),
            "taux" | "tau_x" => Ok(SweepParameter::TauX),
            other => Err(format!("unknown sweep parameter {other:?}")),
        }
    }
}

/// A sweep: which parameter to vary, over which increasing grid, on top of
/// which base parameters.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    parameter: SweepParameter,
    values: Vec<f64>,
    base: ModelParams,
}

impl SweepConfig {
    /// Validates that the grid is strictly increasing and every grid value
    /// yields valid parameters.
    pub fn new(
        parameter: SweepParameter,
        values: Vec<f64>,
        base: ModelParams,
    ) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("sweep grid is empty".into()));
        }
        for w in values.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidConfig(format!(
                    "sweep grid not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        let cfg = Self {
            parameter,
            values,
            base,
        };
        for &v in &cfg.values {
            cfg.apply(v)?;
        }
        Ok(cfg)
    }

    /// Uniform grid of `points` values spanning [lo, hi].
    pub fn uniform(
        parameter: SweepParameter,
        lo: f64,
        hi: f64,
        points: usize,
        base: ModelParams,
    ) -> Result<Self, Error> {
        if points == 0 {
            return Err(Error::InvalidConfig("sweep needs at least one point".into()));
        }
        let values = if points == 1 {
            vec![lo]
        } else {
            (0..points)
                .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
                .collect()
        };
        Self::new(parameter, values, base)
    }

    pub fn parameter(&self) -> SweepParameter {
        self.parameter
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn base(&self) -> &ModelParams {
        &self.base
    }

    /// Base parameters with the swept field set to `value`.
    pub fn apply(&self, value: f64) -> Result<ModelParams, Error> {
        let b = &self.base;
        match self.parameter {
            SweepParameter::BetaBar => {
                ModelParams::new(value, b.delta(), b.k_p(), b.k_x(), b.u0(), b.tau_x())
            }
            SweepParameter::Delta => {
                ModelParams::new(b.beta_bar(), value, b.k_p(), b.k_x(), b.u0(), b.tau_x())
            }
            SweepParameter::KP => {
                ModelParams::new(b.beta_bar(), b.delta(), value, b.k_x(), b.u0(), b.tau_x())
            }
            SweepParameter::KX => {
                ModelParams::new(b.beta_bar(), b.delta(), b.k_p(), value, b.u0(), b.tau_x())
            }
            SweepParameter::U0 => {
                ModelParams::new(b.beta_bar(), b.delta(), b.k_p(), b.k_x(), value, b.tau_x())
            }
            SweepParameter::TauX => {
                ModelParams::new(b.beta_bar(), b.delta(), b.k_p(), b.k_x(), b.u0(), value)
            }
        }
    }
}

/// One equilibrium sample along a branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub parameter: f64,
    pub p: f64,
    pub x: f64,
    pub stability: Stability,
}

/// A maximal run of same-class equilibria linked across the grid.
#[derive(Debug, Clone)]
pub struct Branch {
    pub class: EquilibriumClass,
    /// Points ordered by parameter value.
    pub points: Vec<BranchPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BifurcationKind {
    Transcritical,
    Fold,
}

impl fmt::Display for BifurcationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BifurcationKind::Transcritical => "transcritical",
            BifurcationKind::Fold => "fold",
        })
    }
}

/// A detected bifurcation, refined past the sweep grid.
#[derive(Debug, Clone)]
pub struct BifurcationEvent {
    pub parameter: f64,
    pub kind: BifurcationKind,
    /// Classes of the two participating branches, in class order.
    pub classes: [EquilibriumClass; 2],
}

/// Branches plus detected events for one sweep.
#[derive(Debug, Clone)]
pub struct BifurcationDiagram {
    pub branches: Vec<Branch>,
    pub events: Vec<BifurcationEvent>,
}

/// Internal branch with grid bookkeeping.
struct RawBranch {
    class: EquilibriumClass,
    first_index: usize,
    points: Vec<Equilibrium>,
}

impl RawBranch {
    fn last_index(&self) -> usize {
        self.first_index + self.points.len() - 1
    }

    fn at_index(&self, gi: usize) -> Option<&Equilibrium> {
        if gi < self.first_index || gi > self.last_index() {
            None
        } else {
            Some(&self.points[gi - self.first_index])
        }
    }
}

fn dist(a: &State, b: &State) -> f64 {
    a.distance(b)
}

/// Run `find_equilibria` across the grid and link the results into branches
/// and events.
pub fn sweep(cfg: &SweepConfig) -> Result<BifurcationDiagram, Error> {
    let per_grid: Vec<Vec<Equilibrium>> = cfg
        .values
        .iter()
        .map(|&v| cfg.apply(v).map(|p| find_equilibria(&p)))
        .collect::<Result<_, _>>()?;

    // Branch assembly: same class, previous grid index, within the jump
    // tolerance.
    let mut branches: Vec<RawBranch> = Vec::new();
    for (gi, eqs) in per_grid.iter().enumerate() {
        for eq in eqs {
            let candidates: Vec<usize> = branches
                .iter()
                .enumerate()
                .filter(|(_, b)| {
                    b.class == eq.class
                        && gi >= 1
                        && b.last_index() == gi - 1
                        && dist(&b.points.last().unwrap().state, &eq.state) <= JUMP_TOL
                })
                .map(|(i, _)| i)
                .collect();
            match candidates.len() {
                0 => branches.push(RawBranch {
                    class: eq.class,
                    first_index: gi,
                    points: vec![eq.clone()],
                }),
                1 => branches[candidates[0]].points.push(eq.clone()),
                n => {
                    return Err(Error::BranchLinking {
                        cell: gi,
                        detail: format!(
                            "{} candidate branches of class {} within {JUMP_TOL} of ({}, {})",
                            n,
                            eq.class,
                            eq.state.p(),
                            eq.state.x()
                        ),
                    })
                }
            }
        }
    }

    let events = detect_events(cfg, &branches)?;

    let branches = branches
        .into_iter()
        .map(|rb| Branch {
            class: rb.class,
            points: rb
                .points
                .iter()
                .enumerate()
                .map(|(k, eq)| BranchPoint {
                    parameter: cfg.values[rb.first_index + k],
                    p: eq.state.p(),
                    x: eq.state.x(),
                    stability: eq.stability,
                })
                .collect(),
        })
        .collect();

    Ok(BifurcationDiagram { branches, events })
}

/// Grid cells (by lower index) where a branch's stability flips between
/// stable and unstable.
fn stability_flips(b: &RawBranch) -> Vec<usize> {
    let mut flips = Vec::new();
    for (k, w) in b.points.windows(2).enumerate() {
        let pair = (w[0].stability, w[1].stability);
        if matches!(
            pair,
            (Stability::Stable, Stability::Unstable) | (Stability::Unstable, Stability::Stable)
        ) {
            flips.push(b.first_index + k);
        }
    }
    flips
}

fn detect_events(cfg: &SweepConfig, branches: &[RawBranch]) -> Result<Vec<BifurcationEvent>, Error> {
    let mut events: Vec<BifurcationEvent> = Vec::new();
    let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();

    // Transcritical: a stability flip on one branch paired with either a
    // simultaneous flip on a nearby branch or a branch appearing/vanishing
    // right there.
    for (bi, b1) in branches.iter().enumerate() {
        for cell in stability_flips(b1) {
            let s_lo = &b1.at_index(cell).unwrap().state;
            let s_hi = &b1.at_index(cell + 1).unwrap().state;
            for (bj, b2) in branches.iter().enumerate() {
                if bi == bj {
                    continue;
                }
                let near_flip = stability_flips(b2).contains(&cell)
                    && b2
                        .at_index(cell)
                        .zip(b2.at_index(cell + 1))
                        .map(|(a, b)| {
                            dist(&a.state, s_lo)
                                .min(dist(&b.state, s_hi))
                                .le(&PARTNER_TOL)
                        })
                        .unwrap_or(false);
                let appears = b2.first_index == cell + 1
                    && dist(&b2.points[0].state, s_hi) <= PARTNER_TOL;
                let vanishes = b2.last_index() == cell
                    && dist(&b2.points.last().unwrap().state, s_lo) <= PARTNER_TOL;
                if near_flip || appears || vanishes {
                    let key = (bi.min(bj), bi.max(bj), cell);
                    if seen.insert(key) {
                        let refined = refine_transcritical(cfg, cell, b1)?;
                        let mut classes = [b1.class, b2.class];
                        classes.sort();
                        events.push(BifurcationEvent {
                            parameter: refined,
                            kind: BifurcationKind::Transcritical,
                            classes,
                        });
                    }
                }
            }
        }
    }

    // Fold: two branches born (or dying) together at the same grid value.
    for (bi, b1) in branches.iter().enumerate() {
        for (bj, b2) in branches.iter().enumerate().skip(bi + 1) {
            let born_together = b1.first_index == b2.first_index
                && b1.first_index > 0
                && dist(&b1.points[0].state, &b2.points[0].state) <= FOLD_PAIR_TOL;
            let die_together = b1.last_index() == b2.last_index()
                && b1.last_index() + 1 < cfg.values.len()
                && dist(
                    &b1.points.last().unwrap().state,
                    &b2.points.last().unwrap().state,
                ) <= FOLD_PAIR_TOL;
            if born_together || die_together {
                let cell = if born_together {
                    b1.first_index - 1
                } else {
                    b1.last_index()
                };
                let key = (bi, bj, cell);
                if seen.insert(key) {
                    let refined = refine_fold(cfg, cell);
                    let mut classes = [b1.class, b2.class];
                    classes.sort();
                    events.push(BifurcationEvent {
                        parameter: refined,
                        kind: BifurcationKind::Fold,
                        classes,
                    });
                }
            }
        }
    }

    events.sort_by(|a, b| a.parameter.total_cmp(&b.parameter));
    Ok(events)
}

/// Refine a transcritical event by bisecting the critical eigenvalue of the
/// branch that persists across the cell.
fn refine_transcritical(cfg: &SweepConfig, cell: usize, anchor: &RawBranch) -> Result<f64, Error> {
    let lo = cfg.values[cell];
    let hi = cfg.values[cell + 1];
    let s_lo = anchor.at_index(cell).unwrap().state;
    let s_hi = anchor.at_index(cell + 1).unwrap().state;
    let class = anchor.class;

    let critical_re = |v: f64| -> f64 {
        let params = cfg.apply(v).expect("grid interior value stays valid");
        let frac = (v - lo) / (hi - lo);
        let target_p = s_lo.p() + frac * (s_hi.p() - s_lo.p());
        let target_x = s_lo.x() + frac * (s_hi.x() - s_lo.x());
        find_equilibria(&params)
            .into_iter()
            .filter(|e| e.class == class)
            .min_by(|a, b| {
                let da = (a.state.p() - target_p).hypot(a.state.x() - target_x);
                let db = (b.state.p() - target_p).hypot(b.state.x() - target_x);
                da.total_cmp(&db)
            })
            .map(|e| e.eigenvalues[0].re.max(e.eigenvalues[1].re))
            .unwrap_or(f64::NAN)
    };

    let g_lo = critical_re(lo);
    let g_hi = critical_re(hi);
    if !(g_lo.is_finite() && g_hi.is_finite()) || g_lo * g_hi > 0.0 {
        // The anchor lost track of its equilibrium; report the cell midpoint.
        return Ok(0.5 * (lo + hi));
    }
    Ok(bisect(critical_re, lo, hi, EVENT_REFINE_TOL))
}

/// Refine a fold event by bisecting the minimum of the nullcline gap.
fn refine_fold(cfg: &SweepConfig, cell: usize) -> f64 {
    let lo = cfg.values[cell];
    let hi = cfg.values[cell + 1];
    let x_lo = -1.0 + X_DOMAIN_MARGIN;
    let x_hi = 1.0 - X_DOMAIN_MARGIN;
    let min_gap = |v: f64| -> f64 {
        let params = cfg.apply(v).expect("grid interior value stays valid");
        grid_min(&|x| nullcline_gap_scaled(x, &params), x_lo, x_hi, 4096, 1e-12).1
    };
    if min_gap(lo) * min_gap(hi) > 0.0 {
        return 0.5 * (lo + hi);
    }
    bisect(min_gap, lo, hi, EVENT_REFINE_TOL)
}

/// One exported branch-point record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramRecord {
    pub parameter: f64,
    pub class: EquilibriumClass,
    pub p: f64,
    pub x: f64,
    pub stability: Stability,
}

/// Flatten a diagram into per-point records ordered by (class, parameter),
/// plus its event table ordered by parameter.
pub fn export_diagram(d: &BifurcationDiagram) -> (Vec<DiagramRecord>, Vec<BifurcationEvent>) {
    let mut records: Vec<DiagramRecord> = d
        .branches
        .iter()
        .flat_map(|b| {
            b.points.iter().map(|pt| DiagramRecord {
                parameter: pt.parameter,
                class: b.class,
                p: pt.p,
                x: pt.x,
                stability: pt.stability,
            })
        })
        .collect();
    records.sort_by(|a, b| a.class.cmp(&b.class).then(a.parameter.total_cmp(&b.parameter)));
    (records, d.events.clone())
}
