// SPDX-License-Identifier: Apache-2.0

//! Stochastic Newton equation for the classical particle, in scaled units
//! `x/a` and `s = t/T`:
//!
//! ```text
//! x'' = -(Omega T)^2 [x - s + (eta/2pi) sin 2pi x] - (2 pi alpha Omega T / lambda_bar^2) cos^2(2pi x) x' + xi
//! <xi(s) xi(s')> = D cos^2(2pi x) delta(s - s'),   D = alpha (Omega T)^3 theta / (2 pi lambda_bar^4)
//! ```

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DimensionlessConfig, StochasticScheme};

/// Samples recorded per drive period for the ensemble time series.
pub const SAMPLES_PER_PERIOD: usize = 2000;
/// Fraction of aborted runs above which the whole ensemble fails.
pub const MAX_ABORT_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub x_over_a: f64,
    /// `d(x/a) / d(t/T)`.
    pub v_scaled: f64,
    pub t_over_t: f64,
}

impl ClassicalState {
    /// At rest at the substrate minimum under the trap centre.
    pub fn initial() -> Self {
        Self { x_over_a: 0.0, v_scaled: 0.0, t_over_t: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        self.x_over_a.is_finite() && self.v_scaled.is_finite() && self.t_over_t.is_finite()
    }

    /// `(2 pi / eta)(t/T - x/a)` in units of `F0`.
    pub fn force(&self, eta: f64) -> f64 {
        2.0 * PI / eta * (self.t_over_t - self.x_over_a)
    }
}

/// Deterministic part of `d^2(x/a)/d(t/T)^2`.
pub fn drift_acceleration(s: &ClassicalState, cfg: &DimensionlessConfig) -> f64 {
    let wt = cfg.omega_t;
    let phase = 2.0 * PI * s.x_over_a;
    let spring = -wt * wt * (s.x_over_a - s.t_over_t + cfg.eta / (2.0 * PI) * phase.sin());
    let c = phase.cos();
    let damping = 2.0 * PI * cfg.alpha * wt / (cfg.lambda_bar * cfg.lambda_bar) * c * c;
    spring - damping * s.v_scaled
}

/// Noise strength `D` of the delta-correlated force at a coupling antinode.
pub fn noise_strength(cfg: &DimensionlessConfig) -> f64 {
    cfg.alpha * cfg.omega_t.powi(3) * cfg.theta / (2.0 * PI * cfg.lambda_bar.powi(4))
}

/// Per-step standard deviation of the random acceleration, `sqrt(D cos^2(2pi x) / dt)`.
pub fn noise_sigma(s: &ClassicalState, cfg: &DimensionlessConfig, dt_over_t: f64) -> f64 {
    let c = (2.0 * PI * s.x_over_a).cos();
    (noise_strength(cfg) * c * c / dt_over_t).sqrt()
}

/// Advance by `dt` given the standard-normal sample `z` driving this step.
///
/// Ito: symplectic Euler-Maruyama (velocity first, then position with the
/// new velocity), noise at the pre-step position. Stratonovich: stochastic
/// Heun with the same Wiener increment in predictor and corrector.
pub fn step_with_sample(s: &ClassicalState, cfg: &DimensionlessConfig, dt: f64, z: f64) -> ClassicalState {
    let dw = z * dt.sqrt();
    let diffusion = |st: &ClassicalState| {
        let c = (2.0 * PI * st.x_over_a).cos();
        (noise_strength(cfg) * c * c).sqrt()
    };
    match cfg.stochastic_scheme {
        StochasticScheme::Ito => {
            let v = s.v_scaled + drift_acceleration(s, cfg) * dt + diffusion(s) * dw;
            ClassicalState { x_over_a: s.x_over_a + v * dt, v_scaled: v, t_over_t: s.t_over_t + dt }
        }
        StochasticScheme::Stratonovich => {
            let a0 = drift_acceleration(s, cfg);
            let g0 = diffusion(s);
            let pred = ClassicalState {
                x_over_a: s.x_over_a + s.v_scaled * dt,
                v_scaled: s.v_scaled + a0 * dt + g0 * dw,
                t_over_t: s.t_over_t + dt,
            };
            let a1 = drift_acceleration(&pred, cfg);
            let g1 = diffusion(&pred);
            ClassicalState {
                x_over_a: s.x_over_a + 0.5 * (s.v_scaled + pred.v_scaled) * dt,
                v_scaled: s.v_scaled + 0.5 * (a0 + a1) * dt + 0.5 * (g0 + g1) * dw,
                t_over_t: s.t_over_t + dt,
            }
        }
    }
}

/// One step of size `1 / n_steps_classical` drawing its noise from `rng`.
pub fn step<R: Rng>(s: &ClassicalState, cfg: &DimensionlessConfig, rng: &mut R) -> Result<ClassicalState> {
    let dt = 1.0 / cfg.n_steps_classical as f64;
    let z: f64 = if cfg.theta > 0.0 && cfg.alpha > 0.0 { rng.sample(StandardNormal) } else { 0.0 };
    let next = step_with_sample(s, cfg, dt, z);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFinite(s.t_over_t))
    }
}

/// Independent random stream for one run of the ensemble.
pub fn run_stream(seed: u64, run_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index as u64);
    rng
}

/// One trajectory of the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalRun {
    /// First-period maximum of the force.
    pub max_force: f64,
    /// First time the first-period maximum is attained.
    pub slip_time: f64,
    /// `x/a` at the recorded times.
    pub positions: Vec<f64>,
}

/// Recording stride in integrator steps.
pub fn record_stride(cfg: &DimensionlessConfig) -> usize {
    (cfg.n_steps_classical / SAMPLES_PER_PERIOD).max(1)
}

/// Integrate run `run_index` from [`ClassicalState::initial`] over `n_periods`.
pub fn run_single(cfg: &DimensionlessConfig, run_index: usize) -> Result<ClassicalRun> {
    let mut rng = run_stream(cfg.seed, run_index);
    let n = cfg.n_steps_classical;
    let dt = 1.0 / n as f64;
    let stride = record_stride(cfg);
    let total = n * cfg.n_periods;

    let mut s = ClassicalState::initial();
    let mut out = ClassicalRun {
        max_force: s.force(cfg.eta),
        slip_time: 0.0,
        positions: Vec::with_capacity(total / stride + 1),
    };
    out.positions.push(s.x_over_a);
    for k in 1..=total {
        s = step(&s, cfg, &mut rng)?;
        // pin the clock to the grid so records land on exact times
        s.t_over_t = k as f64 * dt;
        if k <= n {
            let f = s.force(cfg.eta);
            if f > out.max_force {
                out.max_force = f;
                out.slip_time = s.t_over_t;
            }
        }
        if k % stride == 0 {
            out.positions.push(s.x_over_a);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// Ensemble mean of `x/a`.
    pub mean_trajectory: Vec<f64>,
    /// Ensemble mean force `(2 pi / eta)(t/T - <x>/a)`.
    pub force_series: Vec<f64>,
    pub per_run_max_force: Vec<f64>,
    pub per_run_slip_time: Vec<f64>,
    /// Mean over runs of each run's first-period maximum.
    pub f_max: f64,
    /// First-period maximum of the ensemble-mean force.
    pub f_max_of_mean: f64,
    pub mean_slip_time: f64,
    pub aborted: usize,
    pub seed: u64,
    pub scheme: StochasticScheme,
    pub cfg: DimensionlessConfig,
}

/// Run the `n_ran` trajectories in parallel and reduce them in run order.
pub fn run_ensemble(cfg: &DimensionlessConfig) -> Result<EnsembleResult> {
    cfg.validate()?;
    let runs: Vec<Result<ClassicalRun>> = (0..cfg.n_ran).into_par_iter().map(|j| run_single(cfg, j)).collect();
    let total = runs.len();
    let ok: Vec<ClassicalRun> = runs.into_iter().filter_map(|r| r.ok()).collect();
    let aborted = total - ok.len();
    if ok.is_empty() || aborted as f64 > MAX_ABORT_FRACTION * total as f64 {
        return Err(Error::EnsembleAborted { aborted, total });
    }

    let stride = record_stride(cfg);
    let dt = 1.0 / cfg.n_steps_classical as f64;
    let len = ok[0].positions.len();
    let times: Vec<f64> = (0..len).map(|i| (i * stride) as f64 * dt).collect();
    let count = ok.len() as f64;
    let mut mean_trajectory = vec![0.0; len];
    for run in &ok {
        for (m, x) in mean_trajectory.iter_mut().zip(&run.positions) {
            *m += x;
        }
    }
    mean_trajectory.iter_mut().for_each(|m| *m /= count);
    let force_series: Vec<f64> = times
        .iter()
        .zip(&mean_trajectory)
        .map(|(t, x)| 2.0 * PI / cfg.eta * (t - x))
        .collect();
    let f_max_of_mean = times
        .iter()
        .zip(&force_series)
        .filter(|(t, _)| **t <= 1.0 + 1e-12)
        .map(|(_, f)| *f)
        .fold(f64::NEG_INFINITY, f64::max);

    let per_run_max_force: Vec<f64> = ok.iter().map(|r| r.max_force).collect();
    let per_run_slip_time: Vec<f64> = ok.iter().map(|r| r.slip_time).collect();
    Ok(EnsembleResult {
        f_max: per_run_max_force.iter().sum::<f64>() / count,
        mean_slip_time: per_run_slip_time.iter().sum::<f64>() / count,
        times,
        mean_trajectory,
        force_series,
        per_run_max_force,
        per_run_slip_time,
        f_max_of_mean,
        aborted,
        seed: cfg.seed,
        scheme: cfg.stochastic_scheme,
        cfg: cfg.clone(),
    })
}
