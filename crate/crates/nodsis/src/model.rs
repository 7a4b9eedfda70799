//! Scalar coupled opinion-epidemic model: parameters, state, vector fields,
//! nullcline functions, and the closed-form Jacobian.
//!
//! The model couples SIS infection dynamics with a saturating nonlinear
//! opinion update. With `p` the infected fraction and `x` the opinion,
//!
//! ```text
//! dp/dt       = beta_bar (1 + x)(1 - p) p - delta p
//! tau_x dx/dt = -x + tanh( (k_p p + k_x x^2 + u0) x )
//! ```
//!
//! Opinion `x < 0` reduces contact (risk aversion), `x > 0` increases it
//! (risk seeking). The dynamics are trapped in Omega = [0,1] x [-1,1].
//! All types here are immutable after construction and all functions are
//! pure; everything is safe to share across threads.

use num_complex::Complex64;

use crate::error::Error;

/// Nullcline functions are evaluated on `[-1 + X_DOMAIN_MARGIN, 1 - X_DOMAIN_MARGIN]`
/// only; `arctanh` and the endemic term diverge at the endpoints.
pub const X_DOMAIN_MARGIN: f64 = 1e-9;

/// Scalar model parameters.
///
/// Validated at construction: `beta_bar`, `delta`, `tau_x` strictly positive,
/// `k_p`, `k_x`, `u0` non-negative, everything finite. The urgency-threshold
/// condition (`u0 < 1` and `k_p + u0 > 1`) is *not* enforced here; analysis
/// routines that rely on it check [`ModelParams::assumption1_holds`] and
/// refuse explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    beta_bar: f64,
    delta: f64,
    k_p: f64,
    k_x: f64,
    u0: f64,
    tau_x: f64,
}

impl ModelParams {
    pub fn new(
        beta_bar: f64,
        delta: f64,
        k_p: f64,
        k_x: f64,
        u0: f64,
        tau_x: f64,
    ) -> Result<Self, Error> {
        let positive = |name, value: f64| -> Result<(), Error> {
            if !value.is_finite() || value <= 0.0 {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and > 0",
                })
            } else {
                Ok(())
            }
        };
        let non_negative = |name, value: f64| -> Result<(), Error> {
            if !value.is_finite() || value < 0.0 {
                Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and >= 0",
                })
            } else {
                Ok(())
            }
        };
        positive("beta_bar", beta_bar)?;
        positive("delta", delta)?;
        positive("tau_x", tau_x)?;
        non_negative("k_p", k_p)?;
        non_negative("k_x", k_x)?;
        non_negative("u0", u0)?;
        Ok(Self {
            beta_bar,
            delta,
            k_p,
            k_x,
            u0,
            tau_x,
        })
    }

    /// Transmissibility.
    pub fn beta_bar(&self) -> f64 {
        self.beta_bar
    }

    /// Recovery rate.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Infection feedback gain.
    pub fn k_p(&self) -> f64 {
        self.k_p
    }

    /// Opinion (peer pressure) feedback gain.
    pub fn k_x(&self) -> f64 {
        self.k_x
    }

    /// Basal urgency.
    pub fn u0(&self) -> f64 {
        self.u0
    }

    /// Opinion timescale.
    pub fn tau_x(&self) -> f64 {
        self.tau_x
    }

    /// `u0 < 1` (neutral opinion stable at zero infection) together with
    /// `k_p + u0 > 1` (maximal infection destabilizes neutrality).
    pub fn assumption1_holds(&self) -> bool {
        self.u0 < 1.0 && self.k_p + self.u0 > 1.0
    }

    /// Weak peer pressure `k_x < 1/3`: the opinion nullcline is convex and
    /// the equilibrium structure is fully classified.
    pub fn weak_peer_pressure(&self) -> bool {
        self.k_x < 1.0 / 3.0
    }

    /// Same parameters with a different transmissibility.
    pub fn with_beta_bar(&self, beta_bar: f64) -> Result<Self, Error> {
        Self::new(beta_bar, self.delta, self.k_p, self.k_x, self.u0, self.tau_x)
    }
}

/// A point (p, x) in the trapping region Omega = [0,1] x [-1,1].
///
/// Construction outside Omega is rejected, so a `State` always carries a
/// valid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    p: f64,
    x: f64,
}

impl State {
    pub fn new(p: f64, x: f64) -> Result<Self, Error> {
        if !p.is_finite() || !x.is_finite() || !(0.0..=1.0).contains(&p) || !(-1.0..=1.0).contains(&x)
        {
            return Err(Error::StateOutsideDomain { p, x });
        }
        Ok(Self { p, x })
    }

    /// Infected fraction, in [0, 1].
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Opinion, in [-1, 1].
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Euclidean distance to another state.
    pub fn distance(&self, other: &State) -> f64 {
        ((self.p - other.p).powi(2) + (self.x - other.x).powi(2)).sqrt()
    }
}

/// Rate of change of a [`State`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub dp: f64,
    pub dx: f64,
}

impl Derivative {
    /// Max-norm of the derivative.
    pub fn max_norm(&self) -> f64 {
        self.dp.abs().max(self.dx.abs())
    }
}

/// Net urgency `u(p, x) = k_p p + k_x x^2 + u0` driving the opinion update.
///
/// `u = 1` is the critical gain: below it the linear damping stabilizes the
/// neutral opinion, above it the saturating feedback destabilizes it.
pub fn urgency(s: State, params: &ModelParams) -> f64 {
    // Term order mirrors the networked model so the single-node reduction is exact.
    params.k_p * s.p + params.k_x * (s.x * s.x) + params.u0
}

/// Right-hand side of the coupled model at a state in Omega.
pub fn vector_field(s: State, params: &ModelParams) -> Derivative {
    let (dp, dx) = vector_field_raw(s.p, s.x, params);
    Derivative { dp, dx }
}

/// Field formulas without the Omega membership check.
///
/// The expressions are total (tanh saturates), which lets integrator stages
/// and finite-difference probes evaluate slightly outside Omega.
pub(crate) fn vector_field_raw(p: f64, x: f64, params: &ModelParams) -> (f64, f64) {
    let dp = params.beta_bar * (1.0 + x) * (1.0 - p) * p - params.delta * p;
    let u = params.k_p * p + params.k_x * (x * x) + params.u0;
    let dx = (-x + (u * x).tanh()) / params.tau_x;
    (dp, dx)
}

/// Opinion-free SIS baseline `dp/dt = beta_bar alpha (1 - p) p - delta p`.
///
/// `alpha` is the fixed per-capita contact rate; comparisons against the
/// coupled model use `alpha = 1`.
pub fn sis_vector_field(p: f64, params: &ModelParams, alpha: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p) && alpha > 0.0);
    params.beta_bar * alpha * (1.0 - p) * p - params.delta * p
}

/// `arctanh(x) / x` with the removable singularity at zero filled by its
/// series `1 + x^2/3 + x^4/5` (error below 1e-17 for |x| < 1e-4).
pub(crate) fn atanh_over_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 3.0 + x2 * x2 / 5.0
    } else {
        x.atanh() / x
    }
}

/// `sech^2(y)` computed as `1 - tanh^2(y)`, stable for all arguments.
pub(crate) fn sech_sq(y: f64) -> f64 {
    let t = y.tanh();
    1.0 - t * t
}

fn check_nullcline_domain(x: f64) -> Result<(), Error> {
    if !x.is_finite() || x.abs() > 1.0 - X_DOMAIN_MARGIN {
        Err(Error::OpinionOutOfDomain { x })
    } else {
        Ok(())
    }
}

/// Scaled opinion nullcline `arctanh(x)/x - k_x x^2 - u0`.
///
/// This equals `k_p` times [`opinion_nullcline`] and shares its roots while
/// remaining defined for `k_p = 0`; the root finders work on this form.
pub(crate) fn opinion_nullcline_scaled(x: f64, params: &ModelParams) -> f64 {
    atanh_over_x(x) - params.k_x * (x * x) - params.u0
}

/// The infected fraction on the opinion nullcline at opinion `x`:
/// `(arctanh(x)/x - k_x x^2 - u0) / k_p`.
///
/// Its roots are the opinion levels of infection-free opinionated equilibria.
/// At `x = 0` the removable singularity evaluates to `(1 - u0) / k_p`.
pub fn opinion_nullcline(x: f64, params: &ModelParams) -> Result<f64, Error> {
    check_nullcline_domain(x)?;
    if params.k_p == 0.0 {
        return Err(Error::DegenerateParameter(
            "opinion nullcline height undefined for k_p = 0",
        ));
    }
    Ok(opinion_nullcline_scaled(x, params) / params.k_p)
}

/// Scaled version of [`nullcline_gap`] (multiplied by `k_p`), defined for all
/// `k_p >= 0`. Shares the roots of the unscaled form when `k_p > 0`.
pub(crate) fn nullcline_gap_scaled(x: f64, params: &ModelParams) -> f64 {
    opinion_nullcline_scaled(x, params)
        - params.k_p * (1.0 - params.delta / (params.beta_bar * (1.0 + x)))
}

/// Signed gap between the opinion nullcline and the endemic infection
/// nullcline at opinion `x`; its roots are the opinion coordinates of
/// opinionated endemic equilibria.
pub fn nullcline_gap(x: f64, params: &ModelParams) -> Result<f64, Error> {
    let base = opinion_nullcline(x, params)?;
    Ok(base + params.delta / (params.beta_bar * (1.0 + x)) - 1.0)
}

/// 2x2 Jacobian of the coupled model with its eigenvalues.
///
/// Eigenvalues are computed in closed form from the trace and determinant and
/// sorted by real part, then imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian2x2 {
    j11: f64,
    j12: f64,
    j21: f64,
    j22: f64,
    eigenvalues: [Complex64; 2],
}

impl Jacobian2x2 {
    pub fn new(j11: f64, j12: f64, j21: f64, j22: f64) -> Self {
        let trace = j11 + j22;
        let det = j11 * j22 - j12 * j21;
        let disc = trace * trace - 4.0 * det;
        let eigenvalues = if disc >= 0.0 {
            let root = disc.sqrt();
            let a = Complex64::new(0.5 * (trace - root), 0.0);
            let b = Complex64::new(0.5 * (trace + root), 0.0);
            [a, b]
        } else {
            let imag = 0.5 * (-disc).sqrt();
            [
                Complex64::new(0.5 * trace, -imag),
                Complex64::new(0.5 * trace, imag),
            ]
        };
        Self {
            j11,
            j12,
            j21,
            j22,
            eigenvalues,
        }
    }

    pub fn j11(&self) -> f64 {
        self.j11
    }

    pub fn j12(&self) -> f64 {
        self.j12
    }

    pub fn j21(&self) -> f64 {
        self.j21
    }

    pub fn j22(&self) -> f64 {
        self.j22
    }

    pub fn trace(&self) -> f64 {
        self.j11 + self.j22
    }

    pub fn det(&self) -> f64 {
        self.j11 * self.j22 - self.j12 * self.j21
    }

    /// Eigenvalues sorted by (real part, imaginary part).
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        self.eigenvalues
    }
}

/// Closed-form Jacobian of the coupled model at a state in Omega:
///
/// ```text
/// j11 = beta_bar (1 + x)(1 - 2p) - delta        j12 = beta_bar (1 - p) p
/// j21 = (k_p / tau_x) x sech^2(u x)             j22 = (-1 + (2 k_x x^2 + u) sech^2(u x)) / tau_x
/// ```
pub fn analytic_jacobian(s: State, params: &ModelParams) -> Jacobian2x2 {
    let u = urgency(s, params);
    let sech2 = sech_sq(u * s.x);
    let j11 = params.beta_bar * (1.0 + s.x) * (1.0 - 2.0 * s.p) - params.delta;
    let j12 = params.beta_bar * (1.0 - s.p) * s.p;
    let j21 = params.k_p / params.tau_x * s.x * sech2;
    let j22 = (-1.0 + (2.0 * params.k_x * (s.x * s.x) + u) * sech2) / params.tau_x;
    Jacobian2x2::new(j11, j12, j21, j22)
}
