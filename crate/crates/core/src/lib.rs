// SPDX-License-Identifier: Apache-2.0

//! Quantum and classical simulation of atomic-scale friction for a particle
//! dragged by a harmonic trap over a sinusoidal substrate.
//!
//! The quantum side propagates a Born-Markov master equation in a basis of
//! oscillator states that moves with the trap; the classical side integrates
//! a Langevin ensemble. [`asymptotics`] holds closed-form limits used as
//! reference values, and [`sweep`] runs both engines over parameter grids.

pub mod asymptotics;
pub mod bath;
pub mod classical;
pub mod config;
pub mod error;
pub mod operators;
pub mod output;
pub mod params;
pub mod quantum;
pub mod scenario;
pub mod special;
pub mod spectrum;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use params::{DimensionlessConfig, PhysicalParams, StochasticScheme};
pub use scenario::{Formalism, SweepKind, SweepSpec};
