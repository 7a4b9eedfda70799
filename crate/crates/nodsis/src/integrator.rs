//! Fixed-step trajectory integration with trapping-region enforcement,
//! convergence detection, and basin-of-attraction experiments.
//!
//! The integrator is classic fourth-order Runge-Kutta with a fixed step.
//! The exact flow never leaves Omega = [0,1] x [-1,1]; discrete steps may
//! drift out by floating-point amounts, which are clamped back and recorded.
//! An excursion beyond [`CLAMP_TOL`] is not drift but an integration failure
//! and raises an error.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::equilibria::{find_equilibria, Equilibrium, EquilibriumClass};
use crate::error::Error;
use crate::model::{vector_field_raw, ModelParams, State};

/// Largest boundary excursion tolerated (and silently clamped) per step.
pub const CLAMP_TOL: f64 = 1e-6;
/// A converged endpoint is matched to the nearest equilibrium within this
/// radius; farther endpoints are reported as unmatched anomalies.
pub const LIMIT_MATCH_RADIUS: f64 = 1e-4;
/// Name of the deterministic generator used for seeded experiments.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Fixed-step integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    /// Step size (time units).
    pub dt: f64,
    /// Integration horizon (time units).
    pub t_end: f64,
    /// Max-norm derivative threshold below which the trajectory has
    /// converged.
    pub convergence_tol: f64,
    /// Record every this-many steps (the initial and final states are always
    /// recorded).
    pub record_stride: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_end: 500.0,
            convergence_tol: 1e-10,
            record_stride: 10,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "t_end = {} must be > 0",
                self.t_end
            )));
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "convergence_tol = {} must be > 0",
                self.convergence_tol
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidConfig("record_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// A recorded trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Strictly increasing sample times.
    pub times: Vec<f64>,
    /// Sampled states, one per time; all inside the trapping region.
    pub states: Vec<State>,
    /// Whether the vector field dropped below the convergence threshold
    /// before the horizon.
    pub converged: bool,
    /// The equilibrium the trajectory settled on, when one matches within
    /// [`LIMIT_MATCH_RADIUS`]. `converged` with `limit = None` flags an
    /// endpoint near no known equilibrium.
    pub limit: Option<Equilibrium>,
    /// Largest distance outside the trapping region seen before clamping.
    pub max_excursion: f64,
}

impl Trajectory {
    pub fn initial(&self) -> State {
        self.states[0]
    }

    pub fn final_state(&self) -> State {
        *self.states.last().expect("trajectory carries >= 1 state")
    }
}

fn rk4_step(p: f64, x: f64, dt: f64, params: &ModelParams) -> (f64, f64) {
    let (k1p, k1x) = vector_field_raw(p, x, params);
    let (k2p, k2x) = vector_field_raw(p + 0.5 * dt * k1p, x + 0.5 * dt * k1x, params);
    let (k3p, k3x) = vector_field_raw(p + 0.5 * dt * k2p, x + 0.5 * dt * k2x, params);
    let (k4p, k4x) = vector_field_raw(p + dt * k3p, x + dt * k3x, params);
    (
        p + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        x + (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
    )
}

fn excursion(p: f64, x: f64) -> f64 {
    let ep = (0.0 - p).max(p - 1.0).max(0.0);
    let ex = (-1.0 - x).max(x - 1.0).max(0.0);
    ep.max(ex)
}

/// Integrate from `s0`, matching a converged endpoint against the given
/// equilibrium list. Callers integrating many trajectories under the same
/// parameters can locate the equilibria once and reuse them.
pub fn integrate_with_equilibria(
    s0: State,
    params: &ModelParams,
    cfg: &IntegrationConfig,
    equilibria: &[Equilibrium],
) -> Result<Trajectory, Error> {
    cfg.validate()?;
    let n_steps = (cfg.t_end / cfg.dt).ceil() as usize;
    let mut p = s0.p();
    let mut x = s0.x();
    let mut times = vec![0.0];
    let mut states = vec![s0];
    let mut last_recorded_step = 0usize;
    let mut max_excursion = 0.0f64;
    let mut converged = false;
    let mut step = 0usize;

    loop {
        let (dp, dx) = vector_field_raw(p, x, params);
        if dp.abs().max(dx.abs()) < cfg.convergence_tol {
            converged = true;
            break;
        }
        if step >= n_steps {
            break;
        }
        let (pn, xn) = rk4_step(p, x, cfg.dt, params);
        step += 1;
        let exc = excursion(pn, xn);
        if exc > CLAMP_TOL {
            return Err(Error::InvarianceViolation {
                t: step as f64 * cfg.dt,
                excursion: exc,
                tol: CLAMP_TOL,
            });
        }
        max_excursion = max_excursion.max(exc);
        p = pn.clamp(0.0, 1.0);
        x = xn.clamp(-1.0, 1.0);
        if step % cfg.record_stride == 0 {
            times.push(step as f64 * cfg.dt);
            states.push(State::new(p, x).expect("clamped state lies in the trapping region"));
            last_recorded_step = step;
        }
    }

    if step > last_recorded_step {
        times.push(step as f64 * cfg.dt);
        states.push(State::new(p, x).expect("clamped state lies in the trapping region"));
    }

    let limit = if converged {
        let here = State::new(p, x).expect("clamped state lies in the trapping region");
        equilibria
            .iter()
            .map(|eq| (eq, eq.state.distance(&here)))
            .filter(|(_, d)| *d <= LIMIT_MATCH_RADIUS)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(eq, _)| eq.clone())
    } else {
        None
    };

    Ok(Trajectory {
        times,
        states,
        converged,
        limit,
        max_excursion,
    })
}

/// Integrate from `s0` until convergence or the horizon.
pub fn integrate(
    s0: State,
    params: &ModelParams,
    cfg: &IntegrationConfig,
) -> Result<Trajectory, Error> {
    let equilibria = find_equilibria(params);
    integrate_with_equilibria(s0, params, cfg, &equilibria)
}

/// Whether the opinion kept the sign it started with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignInvariance {
    Holds,
    /// The opinion sign flipped at the contained sample time.
    Violated { at_time_index: usize },
    /// The trajectory started on the invariant line x = 0.
    NotApplicable,
}

/// Check that `sign(x(t)) = sign(x(0))` at every recorded sample.
///
/// Samples with |x| below 1e-12 are treated as transient zero crossings and
/// count as violations only if a later sample carries the opposite sign.
pub fn check_sign_invariance(traj: &Trajectory) -> SignInvariance {
    let x0 = traj.initial().x();
    if x0 == 0.0 {
        return SignInvariance::NotApplicable;
    }
    let sign0 = x0.signum();
    for (i, s) in traj.states.iter().enumerate().skip(1) {
        let x = s.x();
        if x.abs() < 1e-12 {
            continue;
        }
        if x.signum() != sign0 {
            return SignInvariance::Violated { at_time_index: i };
        }
    }
    SignInvariance::Holds
}

/// One basin-of-attraction sample.
#[derive(Debug, Clone)]
pub struct BasinSample {
    /// Position in the experiment's draw order.
    pub index: usize,
    pub initial: State,
    /// Class of the matched limit equilibrium; `None` when the run did not
    /// converge or converged away from every known equilibrium.
    pub limit_class: Option<EquilibriumClass>,
    pub converged: bool,
    /// Seed of the experiment this sample belongs to.
    pub seed: u64,
}

/// Draw a state uniformly from the interior of the trapping region.
fn draw_interior_state<R: Rng>(rng: &mut R) -> State {
    loop {
        let p: f64 = rng.gen();
        let x: f64 = rng.gen_range(-1.0..1.0);
        if p > 0.0 && p < 1.0 && x != 0.0 && x > -1.0 {
            return State::new(p, x).expect("interior draw");
        }
    }
}

/// Integrate `n_samples` seeded random initial conditions and report which
/// equilibrium each one settles on.
///
/// Initial states are drawn uniformly over the interior of the trapping
/// region with a ChaCha8 generator, so the sample set is reproducible for a
/// fixed seed. Non-convergent samples are returned flagged, not dropped.
pub fn basin_experiment(
    params: &ModelParams,
    n_samples: usize,
    seed: u64,
    cfg: &IntegrationConfig,
) -> Result<Vec<BasinSample>, Error> {
    cfg.validate()?;
    let equilibria = find_equilibria(params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initials: Vec<State> = (0..n_samples).map(|_| draw_interior_state(&mut rng)).collect();

    let mut out = Vec::with_capacity(n_samples);
    for (index, s0) in initials.into_iter().enumerate() {
        let traj = integrate_with_equilibria(s0, params, cfg, &equilibria)?;
        out.push(BasinSample {
            index,
            initial: s0,
            limit_class: traj.limit.as_ref().map(|eq| eq.class),
            converged: traj.converged,
            seed,
        });
    }
    Ok(out)
}
