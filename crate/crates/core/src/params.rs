// SPDX-License-Identifier: Apache-2.0

//! Physical inputs, the dimensionless parameter space, and the conversion
//! between them.
//!
//! Everything downstream of [`nondimensionalize`] works in units where
//! `hbar = Omega = 1`, lengths are measured in lattice constants `a`, and
//! time is either `Omega*t` (quantum propagator) or `t/T` (classical
//! integrator and all recorded observables).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;

/// Short/long-range separation model for the corrugation amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationModel {
    /// Short-range constant `C_sr` (J).
    pub c_sr: f64,
    /// Short-range decay length `d0` (m).
    pub d0: f64,
    /// Long-range constant `C_lr` (J m^sigma).
    pub c_lr: f64,
    /// Long-range power law `sigma_lr`.
    pub sigma_lr: f64,
    /// Particle-chain separation `d` (m).
    pub separation: f64,
}

/// How the corrugation amplitude `U0` is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Corrugation {
    /// Direct amplitude in joules.
    Amplitude(f64),
    /// Evaluated from the separation model.
    Separation(SeparationModel),
}

/// Physical (SI) description of a trap-driven particle over a chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mass: f64,
    pub lattice_constant: f64,
    pub trap_frequency: f64,
    pub drive_velocity: f64,
    pub corrugation: Corrugation,
    pub alpha: f64,
    pub temperature: f64,
    pub cutoff_frequency: f64,
}

/// Interaction amplitude `C_sr exp(-d/d0) - C_lr d^(-sigma_lr)`.
pub fn interaction_potential(d: f64, model: &SeparationModel) -> Result<f64> {
    if !(d > 0.0) || !(model.d0 > 0.0) {
        return Err(Error::Domain(format!(
            "separation and decay length must be positive (d = {d}, d0 = {})",
            model.d0
        )));
    }
    if !(model.sigma_lr > 0.0) {
        return Err(Error::Domain(format!(
            "long-range power must be positive (sigma_lr = {})",
            model.sigma_lr
        )));
    }
    Ok(model.c_sr * (-d / model.d0).exp() - model.c_lr * d.powf(-model.sigma_lr))
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("lattice_constant", self.lattice_constant),
            ("trap_frequency", self.trap_frequency),
            ("drive_velocity", self.drive_velocity),
            ("cutoff_frequency", self.cutoff_frequency),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.temperature >= 0.0) {
            return Err(Error::Config(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Corrugation amplitude `U0` in joules.
    pub fn corrugation_amplitude(&self) -> Result<f64> {
        match &self.corrugation {
            Corrugation::Amplitude(u0) => Ok(*u0),
            Corrugation::Separation(model) => interaction_potential(model.separation, model),
        }
    }
}

/// Integration convention for the multiplicative classical noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StochasticScheme {
    /// Euler-Maruyama, noise evaluated at the pre-step position.
    #[default]
    Ito,
    /// Stochastic Heun predictor-corrector.
    Stratonovich,
}

/// A point in the dimensionless simulation space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessConfig {
    /// Corrugation parameter `2 pi^2 U0 / (M Omega^2 a^2)`.
    pub eta: f64,
    /// Length ratio `a / (2 pi l)` with `l = sqrt(hbar / M Omega)`.
    pub lambda_bar: f64,
    /// Drive period in units of the trap period, `Omega T`.
    pub omega_t: f64,
    /// Ohmic coupling strength.
    pub alpha: f64,
    /// Bath temperature `k_B T / hbar Omega`.
    pub theta: f64,
    /// Bath cutoff `omega_c / Omega`.
    pub omega_c_ratio: f64,
    /// Oscillator basis truncation.
    pub n_max: usize,
    /// Quantum RK4 steps per drive period.
    pub n_steps: usize,
    /// Classical integrator steps per drive period.
    pub n_steps_classical: usize,
    /// Classical ensemble size.
    pub n_ran: usize,
    /// Number of drive periods to propagate.
    pub n_periods: usize,
    pub seed: u64,
    /// Quantum observables are recorded every `record_stride` steps.
    pub record_stride: usize,
    pub stochastic_scheme: StochasticScheme,
    /// Keep the principal-value (level shift) part of the bath rates.
    pub lamb_shift: bool,
    /// A quantum run aborts once the smallest density-matrix eigenvalue
    /// drops below this value.
    pub positivity_floor: f64,
}

impl Default for DimensionlessConfig {
    fn default() -> Self {
        Self {
            eta: 2.5,
            lambda_bar: 1.0,
            omega_t: 100.0,
            alpha: 0.01,
            theta: 0.1,
            omega_c_ratio: 10.0,
            n_max: 25,
            n_steps: 20_000,
            n_steps_classical: 100_000,
            n_ran: 200,
            n_periods: 1,
            seed: 0,
            record_stride: 10,
            stochastic_scheme: StochasticScheme::Ito,
            lamb_shift: false,
            positivity_floor: -5e-2,
        }
    }
}

impl DimensionlessConfig {
    /// Dimensionless corrugation `U0 / hbar Omega = 2 eta lambda_bar^2`.
    pub fn u0(&self) -> f64 {
        2.0 * self.eta * self.lambda_bar * self.lambda_bar
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: String| if ok { Ok(()) } else { Err(Error::Config(msg)) };
        check(self.eta > 0.0 && self.eta.is_finite(), format!("eta must be > 0, got {}", self.eta))?;
        check(
            self.lambda_bar > 0.0 && self.lambda_bar.is_finite(),
            format!("lambda_bar must be > 0, got {}", self.lambda_bar),
        )?;
        check(
            self.omega_t > 0.0 && self.omega_t.is_finite(),
            format!("omega_t must be > 0, got {}", self.omega_t),
        )?;
        check(
            self.alpha >= 0.0 && self.alpha.is_finite(),
            format!("alpha must be >= 0, got {}", self.alpha),
        )?;
        check(
            self.theta >= 0.0 && self.theta.is_finite(),
            format!("theta must be >= 0, got {}", self.theta),
        )?;
        check(
            self.omega_c_ratio > 0.0 && self.omega_c_ratio.is_finite(),
            format!("omega_c_ratio must be > 0, got {}", self.omega_c_ratio),
        )?;
        check(self.n_max >= 2, format!("n_max must be >= 2, got {}", self.n_max))?;
        check(self.n_steps >= 100, format!("n_steps must be >= 100, got {}", self.n_steps))?;
        check(
            self.n_steps_classical >= 100,
            format!("n_steps_classical must be >= 100, got {}", self.n_steps_classical),
        )?;
        check(self.n_ran >= 1, format!("n_ran must be >= 1, got {}", self.n_ran))?;
        check(self.n_periods >= 1, format!("n_periods must be >= 1, got {}", self.n_periods))?;
        check(
            self.record_stride >= 1,
            format!("record_stride must be >= 1, got {}", self.record_stride),
        )?;
        check(
            self.positivity_floor <= 0.0,
            format!("positivity_floor must be <= 0, got {}", self.positivity_floor),
        )?;
        let u0 = self.u0();
        check(u0 > 0.0 && u0.is_finite(), format!("derived u0 = {u0} must be finite and positive"))
    }
}

/// Map SI inputs onto the dimensionless parameters.
///
/// Only `eta`, `lambda_bar`, `omega_t`, `alpha`, `theta` and
/// `omega_c_ratio` are taken from `p`; numerical settings come from
/// `DimensionlessConfig::default()`.
pub fn nondimensionalize(p: &PhysicalParams) -> Result<DimensionlessConfig> {
    p.validate()?;
    let u0 = p.corrugation_amplitude()?;
    let (m, a, omega) = (p.mass, p.lattice_constant, p.trap_frequency);
    let cfg = DimensionlessConfig {
        eta: 2.0 * PI * PI * u0 / (m * omega * omega * a * a),
        lambda_bar: a / (2.0 * PI) * (m * omega / HBAR).sqrt(),
        omega_t: omega * a / p.drive_velocity,
        alpha: p.alpha,
        theta: K_B * p.temperature / (HBAR * omega),
        omega_c_ratio: p.cutoff_frequency / omega,
        ..DimensionlessConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}
