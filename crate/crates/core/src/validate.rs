// SPDX-License-Identifier: Apache-2.0

//! Quick self-checks of the numerical invariants, runnable from the CLI.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::asymptotics::{lz_threshold, two_level_bound, two_level_force};
use crate::bath::{dissipative_rate, BathModel};
use crate::classical::{noise_strength, run_stream};
use crate::operators::MovingBasis;
use crate::params::DimensionlessConfig;
use crate::quantum::{initial_state, master_rhs, propagate, MasterEquation};
use crate::special::{assoc_laguerre, solve_u_eta};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

fn laguerre_closed_form() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        for i in 0..=50 {
            let x = 0.2 * i as f64;
            let kf = k as f64;
            let want = 0.5 * (x * x - 2.0 * (kf + 2.0) * x + (kf + 1.0) * (kf + 2.0));
            worst = worst.max((assoc_laguerre(2, k, x).unwrap_or(f64::NAN) - want).abs());
        }
    }
    check("laguerre-closed-form", worst < 1e-11, format!("max error {worst:.2e}"))
}

fn root_residual() -> CheckOutcome {
    let worst = [1.1, 2.5, 6.4, 20.0]
        .iter()
        .map(|&eta| solve_u_eta(eta).map(|u| (u - eta * u.sin()).abs()).unwrap_or(f64::NAN))
        .fold(0.0, f64::max);
    check("u-eta-residual", worst < 1e-10, format!("max residual {worst:.2e}"))
}

fn operator_symmetry_and_period() -> CheckOutcome {
    let basis = MovingBasis::new(&DimensionlessConfig::default());
    let (h0, _) = basis.renormalized_with_coupling(0.0);
    let (h1, _) = basis.renormalized_with_coupling(1.0);
    let asym = h0.hermiticity_error();
    let period = (&h0.data - &h1.data).amax();
    check(
        "operator-symmetry-period",
        asym < 1e-14 && period < 1e-10,
        format!("asymmetry {asym:.2e}, period mismatch {period:.2e}"),
    )
}

fn detailed_balance() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for theta in [0.1, 1.0] {
        let b = BathModel { alpha: 0.01, omega_c_ratio: 10.0, theta };
        for e in [0.1, 1.0, 5.0] {
            let ratio = dissipative_rate(e, &b) / dissipative_rate(-e, &b);
            worst = worst.max((ratio / (e / theta).exp() - 1.0).abs());
        }
    }
    check("detailed-balance", worst < 1e-10, format!("max relative error {worst:.2e}"))
}

fn rhs_trace_free() -> CheckOutcome {
    let cfg = DimensionlessConfig { theta: 0.5, ..Default::default() };
    let eng = MasterEquation::new(&cfg, &BathModel::from_config(&cfg));
    let ops = eng.operators_at(0.37);
    let rhs = master_rhs(&initial_state(&cfg), &ops);
    let tr = rhs.trace().abs();
    let herm = rhs.hermiticity_error();
    check("rhs-trace-hermiticity", tr < 1e-10 && herm < 1e-12, format!("|Tr| {tr:.2e}, asymmetry {herm:.2e}"))
}

fn short_propagation() -> CheckOutcome {
    let cfg = DimensionlessConfig { n_max: 10, n_steps: 4000, ..Default::default() };
    match propagate(&initial_state(&cfg), &cfg, &BathModel::from_config(&cfg)) {
        Ok(t) => {
            let d = t.diagnostics;
            check(
                "propagation-health",
                d.max_trace_error < 1e-6 && d.max_hermiticity_error < 1e-9,
                format!(
                    "trace {:.2e}, hermiticity {:.2e}, min eigenvalue {:.2e}",
                    d.max_trace_error, d.max_hermiticity_error, d.min_eigenvalue
                ),
            )
        }
        Err(e) => check("propagation-health", false, e.to_string()),
    }
}

fn unitary_purity() -> CheckOutcome {
    let cfg = DimensionlessConfig { n_max: 10, n_steps: 4000, alpha: 0.0, eta: 0.5, ..Default::default() };
    match propagate(&initial_state(&cfg), &cfg, &BathModel::from_config(&cfg)) {
        Ok(t) => {
            let drift = t.samples.iter().map(|s| (s.purity - 1.0).abs()).fold(0.0, f64::max);
            check("unitary-purity", drift < 1e-6, format!("max purity drift {drift:.2e}"))
        }
        Err(e) => check("unitary-purity", false, e.to_string()),
    }
}

fn noise_variance() -> CheckOutcome {
    let cfg = DimensionlessConfig::default();
    let dt = 1e-4;
    let n = 100_000;
    let d = noise_strength(&cfg);
    let mut rng = run_stream(12345, 0);
    let kicks: Vec<f64> = (0..n).map(|_| (d * dt).sqrt() * rng.sample::<f64, _>(StandardNormal)).collect();
    let mean = kicks.iter().sum::<f64>() / n as f64;
    let var = kicks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let ratio = var / (d * dt);
    check("noise-variance", (ratio - 1.0).abs() < 0.05, format!("variance / (D dt) = {ratio:.4}"))
}

fn thresholds() -> CheckOutcome {
    let th = lz_threshold(6.4).unwrap_or(f64::NAN);
    let bound = two_level_bound(0.1, 1.0, 100.0);
    let peak = (0..=10_000).map(|k| two_level_force(k as f64 / 1e4, 0.1, 1.0, 100.0)).fold(f64::MIN, f64::max);
    check(
        "asymptotic-oracles",
        (0.33..=0.35).contains(&th) && peak <= bound + 1e-9 && (bound - (2.0 * PI / 10.0 + (-0.25f64).exp())).abs() < 1e-12,
        format!("threshold(6.4) = {th:.5}, two-level peak {peak:.4} <= {bound:.4}"),
    )
}

/// Run every check; all are cheap enough for an interactive session.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        laguerre_closed_form(),
        root_residual(),
        operator_symmetry_and_period(),
        detailed_balance(),
        rhs_trace_free(),
        short_propagation(),
        unitary_purity(),
        noise_variance(),
        thresholds(),
    ]
}
