//! Nonlinear quantum search with a Gross-Pitaevskii type interaction.
//!
//! The state lives in the two-dimensional span of the marked and unmarked
//! uniform superpositions, so most of the work happens on [`ReducedState`].
//! [`analytic`] has closed forms for the critical-γ schedule, [`dynamics`]
//! integrates the equations of motion directly, and [`resources`] turns peak
//! widths into clock and qubit counts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod dynamics;
mod error;
pub mod model;
pub mod resources;

pub use dynamics::{IntegratorConfig, Sampler, VerificationReport};
pub use error::{Error, Result};
pub use model::{
    embed, make_params, project, reduced_generator, Coupling, FullState, GammaPolicy, ReducedState,
    Schedule, SearchParams, Trajectory, DEFAULT_EPSILON, NORM_TOLERANCE,
};
pub use resources::{ResourceProfile, ScalingFit};
