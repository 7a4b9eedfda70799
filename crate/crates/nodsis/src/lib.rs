//! Coupled opinion-epidemic dynamics: a scalar SIS model whose contact rate
//! is modulated by a nonlinearly evolving opinion, plus the structured
//! (networked) variant.
//!
//! The crate provides:
//!
//! - the scalar vector field, nullcline functions, and closed-form Jacobian
//!   ([`model`]);
//! - location and stability classification of every equilibrium, the
//!   bifurcation thresholds, and parameter-regime reports ([`equilibria`]);
//! - fixed-step trajectory integration with trapping-region enforcement and
//!   basin-of-attraction experiments ([`integrator`]);
//! - single-parameter sweeps assembling bifurcation diagrams with detected
//!   transcritical and fold events ([`bifurcation`]);
//! - the networked model over a contact graph and a signed communication
//!   graph, with a standard network-SIS baseline and consensus summaries
//!   ([`network`]).

pub mod bifurcation;
pub mod equilibria;
mod error;
pub mod integrator;
pub mod model;
pub mod network;
mod numerics;

pub use error::Error;
pub use model::{
    analytic_jacobian, nullcline_gap, opinion_nullcline, sis_vector_field, urgency, vector_field,
    Derivative, Jacobian2x2, ModelParams, State,
};
