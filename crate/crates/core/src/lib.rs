//! Quantum potential dynamics (QPD).
//!
//! QPD is Newton's law of motion with the quantum potential
//! `Q = -(hbar^2 / 2m) * lap|psi| / |psi|` added to the classical potential,
//! with the pilot-wave velocity constraint `v = grad S / m` dropped. This crate
//! integrates QPD and pilot-wave (de Broglie-Bohm) trajectories for a catalog of
//! analytic wave functions and checks them against closed-form results:
//!
//! - [`wavemodels`]: analytic wave functions (free Gaussian packet, coherent state,
//!   harmonic eigenstates, potential-step eigenstate, central-potential
//!   superpositions of fixed energy and angular momentum).
//! - [`potential`]: quantum potential, total force and particle energy, plus an
//!   independent finite-difference oracle for `Q`.
//! - [`dynamics`]: adaptive integration of both dynamics with event detection.
//! - [`central`]: constants of motion and regime classification in a central potential.
//! - [`ensemble`]: seeded ensembles and their statistics.
//! - [`oracles`]: closed-form trajectories used as references.
//! - [`cli`]: config-driven scenario runner behind the `qpd` binary.

pub mod central;
pub mod cli;
pub mod dynamics;
pub mod ensemble;
mod error;
pub mod geometry;
pub mod ode;
pub mod oracles;
pub mod potential;
pub mod wavemodels;

pub use error::{Error, Result};
pub use geometry::Vec3;
