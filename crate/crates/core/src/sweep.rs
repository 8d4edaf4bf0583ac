// SPDX-License-Identifier: Apache-2.0

//! Batch execution of parameter points and sweeps.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    classical_force_asymptote, classical_slip_time, classify, lz_threshold, quantum_force_asymptote,
    QuantumAsymptote, Regime,
};
use crate::bath::BathModel;
use crate::classical::{run_ensemble, EnsembleResult};
use crate::error::{Error, Result};
use crate::params::{DimensionlessConfig, StochasticScheme};
use crate::quantum::{initial_state, propagate, summarize_first_period, PropagationDiagnostics, QuantumTrajectory};
use crate::scenario::{expand_sweep, Formalism, SweepSpec};

/// Closed-form reference values attached to every row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValues {
    pub classical_force: Option<f64>,
    pub quantum_force: Option<QuantumAsymptote>,
    pub lz_threshold: Option<f64>,
    pub classical_slip_time: Option<f64>,
}

impl OracleValues {
    pub fn for_config(cfg: &DimensionlessConfig) -> Self {
        Self {
            classical_force: classical_force_asymptote(cfg.eta, cfg.omega_t).ok(),
            quantum_force: quantum_force_asymptote(cfg.eta, cfg.lambda_bar, cfg.omega_t).ok(),
            lz_threshold: lz_threshold(cfg.eta).ok(),
            classical_slip_time: classical_slip_time(cfg.eta).ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDiagnostics {
    /// First-period maximum of the ensemble-mean force.
    pub f_max_of_mean: f64,
    pub mean_slip_time: f64,
    pub aborted: usize,
    pub scheme: StochasticScheme,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowDiagnostics {
    pub eta: f64,
    pub lambda_bar: f64,
    pub omega_t: f64,
    pub theta: f64,
    pub alpha: f64,
    pub oracle: OracleValues,
    pub quantum: Option<PropagationDiagnostics>,
    pub classical: Option<ClassicalDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", content = "reason", rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Failed(String),
}

impl RowStatus {
    pub fn label(&self) -> String {
        match self {
            RowStatus::Ok => "ok".into(),
            RowStatus::Failed(reason) => format!("failed: {reason}"),
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, RowStatus::Ok)
    }
}

/// One (point, formalism) result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub point_index: usize,
    pub swept_value: f64,
    pub formalism: Formalism,
    pub f_max_over_f0: Option<f64>,
    pub p0_min: Option<f64>,
    pub sl_max: Option<f64>,
    pub regime: Regime,
    pub status: RowStatus,
    pub diagnostics: Option<RowDiagnostics>,
}

/// Recorded time series for one row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub point_index: usize,
    pub formalism: Formalism,
    /// `(t/T, x/a, F/F0, P0, S_L)`; the last two are absent for classical rows.
    pub rows: Vec<(f64, f64, f64, Option<f64>, Option<f64>)>,
}

impl TrajectoryTable {
    pub fn from_quantum(point_index: usize, traj: &QuantumTrajectory) -> Self {
        Self {
            point_index,
            formalism: Formalism::Quantum,
            rows: traj
                .samples
                .iter()
                .map(|s| (s.t_over_t, s.mean_x_over_a, s.force_over_f0, Some(s.p0), Some(s.s_l)))
                .collect(),
        }
    }

    pub fn from_classical(point_index: usize, ens: &EnsembleResult) -> Self {
        Self {
            point_index,
            formalism: Formalism::Classical,
            rows: ens
                .times
                .iter()
                .zip(&ens.mean_trajectory)
                .zip(&ens.force_series)
                .map(|((t, x), f)| (*t, *x, *f, None, None))
                .collect(),
        }
    }
}

fn error_reason(e: &Error) -> String {
    match e {
        Error::Positivity { .. } => "positivity".into(),
        Error::TraceDrift { .. } => "trace".into(),
        Error::EnsembleAborted { .. } => "ensemble-aborted".into(),
        Error::NonFinite(_) => "non-finite".into(),
        other => other.to_string(),
    }
}

fn failed_row(point_index: usize, swept_value: f64, formalism: Formalism, regime: Regime, e: &Error) -> PointRow {
    PointRow {
        point_index,
        swept_value,
        formalism,
        f_max_over_f0: None,
        p0_min: None,
        sl_max: None,
        regime,
        status: RowStatus::Failed(error_reason(e)),
        diagnostics: None,
    }
}

fn diagnostics_base(cfg: &DimensionlessConfig) -> RowDiagnostics {
    RowDiagnostics {
        eta: cfg.eta,
        lambda_bar: cfg.lambda_bar,
        omega_t: cfg.omega_t,
        theta: cfg.theta,
        alpha: cfg.alpha,
        oracle: OracleValues::for_config(cfg),
        quantum: None,
        classical: None,
    }
}

/// Run every requested formalism at one point. Engine failures become
/// failed rows without numbers.
pub fn run_point(
    cfg: &DimensionlessConfig,
    formalisms: &[Formalism],
    point_index: usize,
    swept_value: f64,
    keep_trajectories: bool,
) -> (Vec<PointRow>, Vec<TrajectoryTable>) {
    let regime = classify(cfg.eta).regime;
    let mut rows = Vec::new();
    let mut tables = Vec::new();
    for &formalism in formalisms {
        let row = match formalism {
            Formalism::Quantum => {
                let outcome = propagate(&initial_state(cfg), cfg, &BathModel::from_config(cfg))
                    .and_then(|traj| summarize_first_period(&traj).map(|s| (s, traj)));
                match outcome {
                    Ok((summary, traj)) => {
                        if keep_trajectories {
                            tables.push(TrajectoryTable::from_quantum(point_index, &traj));
                        }
                        let mut diag = diagnostics_base(cfg);
                        diag.quantum = Some(traj.diagnostics);
                        PointRow {
                            point_index,
                            swept_value,
                            formalism,
                            f_max_over_f0: Some(summary.f_max),
                            p0_min: Some(summary.p0_min),
                            sl_max: Some(summary.sl_max),
                            regime,
                            status: RowStatus::Ok,
                            diagnostics: Some(diag),
                        }
                    }
                    Err(e) => failed_row(point_index, swept_value, formalism, regime, &e),
                }
            }
            Formalism::Classical => match run_ensemble(cfg) {
                Ok(ens) => {
                    if keep_trajectories {
                        tables.push(TrajectoryTable::from_classical(point_index, &ens));
                    }
                    let mut diag = diagnostics_base(cfg);
                    diag.classical = Some(ClassicalDiagnostics {
                        f_max_of_mean: ens.f_max_of_mean,
                        mean_slip_time: ens.mean_slip_time,
                        aborted: ens.aborted,
                        scheme: ens.scheme,
                    });
                    PointRow {
                        point_index,
                        swept_value,
                        formalism,
                        f_max_over_f0: Some(ens.f_max),
                        p0_min: None,
                        sl_max: None,
                        regime,
                        status: RowStatus::Ok,
                        diagnostics: Some(diag),
                    }
                }
                Err(e) => failed_row(point_index, swept_value, formalism, regime, &e),
            },
        };
        rows.push(row);
    }
    (rows, tables)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMeta {
    pub sweep_kind: String,
    pub base: DimensionlessConfig,
    pub grid: Vec<f64>,
    pub formalisms: Vec<Formalism>,
    pub seed: u64,
    pub code_version: String,
    pub wall_time_s: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub swept_param: String,
    pub points: Vec<PointRow>,
    pub failed_points: usize,
    pub total_points: usize,
    pub meta: SweepMeta,
    #[serde(skip)]
    pub trajectories: Vec<TrajectoryTable>,
}

impl SweepResult {
    /// More than half of the points had at least one failed row.
    pub fn failure_threshold_exceeded(&self) -> bool {
        2 * self.failed_points > self.total_points
    }
}

/// Resolve the worker count: explicit value, then `PT_FRICTION_WORKERS`, then all cores.
pub fn resolve_workers(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var("PT_FRICTION_WORKERS").ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

/// Execute all points of `spec` on `workers` threads. Rows come back
/// ordered by grid index, then formalism.
pub fn run_sweep(spec: &SweepSpec, workers: usize, keep_trajectories: bool) -> Result<SweepResult> {
    let points = expand_sweep(spec)?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let outcomes: Vec<(Vec<PointRow>, Vec<TrajectoryTable>)> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, point)| {
                let value = spec.grid[i];
                match point {
                    Ok(cfg) => run_point(cfg, &spec.formalisms, i, value, keep_trajectories),
                    Err(e) => {
                        let regime = classify(spec.base.eta).regime;
                        let rows =
                            spec.formalisms.iter().map(|&f| failed_row(i, value, f, regime, e)).collect();
                        (rows, Vec::new())
                    }
                }
            })
            .collect()
    });

    let total_points = outcomes.len();
    let failed_points = outcomes.iter().filter(|(rows, _)| rows.iter().any(|r| !r.status.is_ok())).count();
    let (rows, tables): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    Ok(SweepResult {
        swept_param: spec.kind.swept_param().to_string(),
        points: rows.into_iter().flatten().collect(),
        failed_points,
        total_points,
        meta: SweepMeta {
            sweep_kind: spec.kind.name().to_string(),
            base: spec.base.clone(),
            grid: spec.grid.clone(),
            formalisms: spec.formalisms.clone(),
            seed: spec.base.seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: started.elapsed().as_secs_f64(),
            workers,
        },
        trajectories: tables.into_iter().flatten().collect(),
    })
}

/// A single point packaged as a one-row sweep result.
pub fn run_single(cfg: &DimensionlessConfig, formalisms: &[Formalism], keep_trajectories: bool) -> SweepResult {
    let started = Instant::now();
    let (rows, trajectories) = run_point(cfg, formalisms, 0, cfg.eta, keep_trajectories);
    let failed_points = usize::from(rows.iter().any(|r| !r.status.is_ok()));
    SweepResult {
        swept_param: "eta".into(),
        points: rows,
        failed_points,
        total_points: 1,
        meta: SweepMeta {
            sweep_kind: "single-point".into(),
            base: cfg.clone(),
            grid: vec![cfg.eta],
            formalisms: formalisms.to_vec(),
            seed: cfg.seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s: started.elapsed().as_secs_f64(),
            workers: 1,
        },
        trajectories,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::SweepKind;

    fn quick() -> DimensionlessConfig {
        DimensionlessConfig {
            n_max: 8,
            n_steps: 2000,
            n_steps_classical: 2000,
            n_ran: 4,
            ..Default::default()
        }
    }

    #[test]
    fn rows_follow_grid_and_formalism_order() {
        let spec = SweepSpec {
            kind: SweepKind::LambdaSweep,
            grid: vec![0.5, 1.0],
            base: quick(),
            formalisms: vec![Formalism::Quantum, Formalism::Classical],
        };
        let r = run_sweep(&spec, 2, false).unwrap();
        let order: Vec<(f64, Formalism)> = r.points.iter().map(|p| (p.swept_value, p.formalism)).collect();
        assert_eq!(
            order,
            vec![
                (0.5, Formalism::Quantum),
                (0.5, Formalism::Classical),
                (1.0, Formalism::Quantum),
                (1.0, Formalism::Classical)
            ]
        );
        assert_eq!(r.failed_points, 0);
        assert!(r.points.iter().filter(|p| p.formalism == Formalism::Classical).all(|p| p.p0_min.is_none()));
    }

    #[test]
    fn positivity_abort_marks_row_failed() {
        let cfg = DimensionlessConfig { positivity_floor: 0.0, alpha: 0.05, ..quick() };
        let (rows, _) = run_point(&cfg, &[Formalism::Quantum], 0, 1.0, false);
        assert_eq!(rows[0].status, RowStatus::Failed("positivity".into()));
        assert!(rows[0].f_max_over_f0.is_none() && rows[0].p0_min.is_none());
    }

    #[test]
    fn invalid_points_count_as_failures() {
        let spec = SweepSpec {
            kind: SweepKind::TemperatureSweep,
            grid: vec![-2.0, -1.0, 0.1],
            base: quick(),
            formalisms: vec![Formalism::Classical],
        };
        let r = run_sweep(&spec, 1, false).unwrap();
        assert_eq!(r.failed_points, 2);
        assert!(r.failure_threshold_exceeded());
    }

    #[test]
    fn worker_resolution() {
        assert_eq!(resolve_workers(Some(3)), 3);
        assert!(resolve_workers(None) >= 1);
    }
}
