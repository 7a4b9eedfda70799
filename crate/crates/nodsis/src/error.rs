use thiserror::Error;

/// Errors produced by model construction, analysis, and integration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("state ({p}, {x}) lies outside the trapping region [0,1] x [-1,1]")]
    StateOutsideDomain { p: f64, x: f64 },

    #[error("opinion {x} outside the evaluable nullcline domain |x| <= 1 - 1e-9")]
    OpinionOutOfDomain { x: f64 },

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(&'static str),

    #[error("endemic stability threshold undefined: k_p + u0 = {sum} <= 1")]
    ThresholdUndefined { sum: f64 },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    #[error("parameters sit too close to a bifurcation for classification: {0}")]
    NearBifurcation(String),

    #[error("residual {residual:e} exceeds the equilibrium tolerance {tol:e}")]
    NotAnEquilibrium { residual: f64, tol: f64 },

    #[error("invalid integration config: {0}")]
    InvalidConfig(String),

    #[error(
        "trapping-region violation at t = {t}: excursion {excursion:e} exceeds {tol:e} \
         (step size too large)"
    )]
    InvarianceViolation { t: f64, excursion: f64, tol: f64 },

    #[error("trajectory did not converge within the integration horizon")]
    NonConvergent,

    #[error("branch linking ambiguity at grid cell {cell}: {detail}")]
    BranchLinking { cell: usize, detail: String },

    #[error("graph parse error at line {line}: {msg}")]
    GraphParse { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    GraphInvalid(String),

    #[error("invalid network state: {0}")]
    InvalidNetworkState(String),

    #[error("consensus undefined: {0}")]
    ConsensusUndefined(String),
}
