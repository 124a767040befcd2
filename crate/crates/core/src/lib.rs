//! Setpoint-sweep linearization analysis for block-oriented nonlinear systems.
//!
//! The crate simulates block-oriented nonlinear systems (cascades, parallel
//! branches, feedback loops, LFR frames), estimates their best linear
//! approximation around a series of DC setpoints, tracks how the poles and
//! zeros of those linear models move as the setpoint changes, and matches the
//! observed movement pattern against the candidate model families that could
//! (or provably could not) produce it.
//!
//! Modules follow the processing chain:
//!
//! - [`signals`] — excitation generation (random-phase multisines, shaped
//!   Gaussian noise) and amplitude-class scaling.
//! - [`systems`] — block graphs, DC operating-point solving and simulation.
//! - [`linearize`] — analytic small-signal linearization of a block graph;
//!   the ground-truth oracle for everything downstream.
//! - [`estimate`] — empirical FRF estimation and rational-model fitting.
//! - [`rootlocus`] — root extraction, track matching across setpoints,
//!   fixed/moving classification and branch-count rank tests.
//! - [`discriminate`] — the decision table mapping observed pole/zero
//!   behavior to compatible and excluded structure families.
//! - [`config`] / [`pipeline`] — experiment description files and the
//!   end-to-end runner behind the CLI.

mod dft;

#[cfg(test)]
pub(crate) mod demo;

pub mod config;
pub mod discriminate;
pub mod error;
pub mod estimate;
pub mod linearize;
pub mod pipeline;
pub mod poly;
pub mod rootlocus;
pub mod signals;
pub mod systems;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
