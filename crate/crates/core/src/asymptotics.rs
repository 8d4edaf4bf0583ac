// SPDX-License-Identifier: Apache-2.0

//! Closed-form limits: regime boundaries, asymptotic forces, slip times,
//! well depths, Landau-Zener estimates and the two-level force.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::MovingBasis;
use crate::params::DimensionlessConfig;
use crate::special::solve_u_eta;
use crate::spectrum::{diagonalize_symmetric, InstantSpectrum};

/// Upper edge of the stick-slip regime, `3 pi / 2`.
pub const DEEP_CORRUGATION_ETA: f64 = 1.5 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    SingleWell,
    StickSlip,
    DeepCorrugation,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SingleWell => "single-well",
            Regime::StickSlip => "stick-slip",
            Regime::DeepCorrugation => "deep-corrugation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub eta: f64,
    pub regime: Regime,
    pub boundaries: [f64; 2],
}

/// Left-closed intervals `[0, 1)`, `[1, 3pi/2)`, `[3pi/2, inf)`.
pub fn classify(eta: f64) -> RegimeClassification {
    let regime = if eta < 1.0 {
        Regime::SingleWell
    } else if eta < DEEP_CORRUGATION_ETA {
        Regime::StickSlip
    } else {
        Regime::DeepCorrugation
    };
    RegimeClassification { eta, regime, boundaries: [1.0, DEEP_CORRUGATION_ETA] }
}

fn require_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Zero-temperature classical maximum force in units of `F0`.
pub fn classical_force_asymptote(eta: f64, omega_t: f64) -> Result<f64> {
    require_positive("eta", eta)?;
    require_positive("omega_t", omega_t)?;
    Ok(match classify(eta).regime {
        Regime::SingleWell => 1.0 + 2.0 * PI / (eta * omega_t),
        Regime::StickSlip => 1.0,
        Regime::DeepCorrugation => (2.0 * PI / eta).sin(),
    })
}

/// Classical slip time `1/4 + eta / 2pi` in units of `T`.
pub fn classical_slip_time(eta: f64) -> Result<f64> {
    if !(eta >= 1.0) || !eta.is_finite() {
        return Err(Error::NoSlip(eta));
    }
    Ok(0.25 + eta / (2.0 * PI))
}

/// Small-corrugation trajectory: free trap oscillation plus the
/// quasi-static substrate correction,
/// `x/a = t/T - sin(Omega t)/(Omega T) - (eta/2pi) sin(2 pi t/T)`.
pub fn classical_trajectory_small_eta(t_over_t: f64, eta: f64, omega_t: f64) -> f64 {
    t_over_t - (omega_t * t_over_t).sin() / omega_t - eta / (2.0 * PI) * (2.0 * PI * t_over_t).sin()
}

/// Depth of the substrate minima `lambda_bar^2 (eta + sqrt(eta^2 - u^2) - u^2/2)` in `hbar Omega`.
pub fn well_depth(eta: f64, lambda_bar: f64) -> Result<f64> {
    if !(eta > 1.0) || !eta.is_finite() {
        return Err(Error::NoWell(eta));
    }
    require_positive("lambda_bar", lambda_bar)?;
    let u = solve_u_eta(eta)?;
    Ok(lambda_bar * lambda_bar * (eta + (eta * eta - u * u).sqrt() - 0.5 * u * u))
}

/// Length ratio below which no bound level fits inside a minimum.
pub fn lz_threshold(eta: f64) -> Result<f64> {
    Ok(well_depth(eta, 1.0)?.powf(-0.5))
}

/// Large-`eta` form of [`lz_threshold`], `[eta (2 - pi^2 / (2 (1 + eta)))]^(-1/2)`.
pub fn lz_threshold_large_eta(eta: f64) -> Result<f64> {
    if !(eta > 1.0) || !eta.is_finite() {
        return Err(Error::NoWell(eta));
    }
    Ok((eta * (2.0 - PI * PI / (2.0 * (1.0 + eta)))).powf(-0.5))
}

/// Two-level estimate of the maximum quantum force, `2pi/(eta Omega T) + exp(-lambda_bar^-2 / 4)`.
pub fn two_level_bound(eta: f64, lambda_bar: f64, omega_t: f64) -> f64 {
    2.0 * PI / (eta * omega_t) + (-0.25 / (lambda_bar * lambda_bar)).exp()
}

/// Force from the two lowest moving-basis levels.
pub fn two_level_force(t_over_t: f64, eta: f64, lambda_bar: f64, omega_t: f64) -> f64 {
    let k = 2.0 * PI / omega_t;
    let w = (1.0 + 2.0 * lambda_bar * lambda_bar * k * k).sqrt();
    let overlap = (-0.25 / (lambda_bar * lambda_bar)).exp();
    let drive = 2.0 * PI * t_over_t;
    let phi = w * omega_t * t_over_t + eta * omega_t / (2.0 * PI) * overlap / (2.0 * w) * drive.sin();
    2.0 * PI / (eta * omega_t) * (-phi).sin() + overlap * (phi + w * omega_t * t_over_t).sin() * drive.sin()
}

/// Landau-Zener transition probability `exp(-pi gap^2 / (2 hbar |slope_diff| v))`, `hbar = 1`.
pub fn lz_probability(gap: f64, slope_diff: f64, v_scaled: f64) -> Result<f64> {
    if slope_diff == 0.0 {
        return Err(Error::DegenerateSlope);
    }
    require_positive("v_scaled", v_scaled)?;
    Ok((-PI * gap * gap / (2.0 * slope_diff.abs() * v_scaled)).exp())
}

/// Avoided crossing between levels `lower` and `lower + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AvoidedCrossing {
    pub t_over_t: f64,
    pub gap: f64,
    /// `dE/d(x_c/a)` of the two diabatic branches, taken on either side of the crossing.
    pub slope_lower: f64,
    pub slope_upper: f64,
    /// Transit speed of the trap centre, `d(x_c/a)/d(Omega t) = 1/(Omega T)`.
    pub v_scaled: f64,
    pub probability: f64,
}

/// Offset from the crossing at which the diabatic slopes are sampled.
const SLOPE_OFFSET: f64 = 0.05;
/// Central-difference step in `x_c/a`.
const SLOPE_STEP: f64 = 1e-4;

fn spectrum_at(basis: &MovingBasis, t: f64) -> InstantSpectrum {
    diagonalize_symmetric(basis.renormalized_with_coupling(t).0.data, t)
}

fn level_slope(basis: &MovingBasis, t: f64, level: usize) -> f64 {
    let hi = spectrum_at(basis, t + SLOPE_STEP).energies[level];
    let lo = spectrum_at(basis, t - SLOPE_STEP).energies[level];
    (hi - lo) / (2.0 * SLOPE_STEP)
}

/// Locate the smallest gap between `lower` and `lower + 1` on `[t_from, t_to]`
/// and evaluate the Landau-Zener probability for crossing it.
pub fn find_avoided_crossing(
    cfg: &DimensionlessConfig,
    lower: usize,
    t_from: f64,
    t_to: f64,
) -> Result<AvoidedCrossing> {
    if lower + 1 >= cfg.n_max || !(t_to > t_from) {
        return Err(Error::Domain(format!("bad crossing search: level {lower}, window [{t_from}, {t_to}]")));
    }
    let basis = MovingBasis::new(cfg);
    let gap_at = |t: f64| {
        let e = spectrum_at(&basis, t).energies;
        e[lower + 1] - e[lower]
    };
    let samples = 400;
    let h = (t_to - t_from) / samples as f64;
    let (mut best_t, mut best_gap) = (t_from, f64::INFINITY);
    for k in 0..=samples {
        let t = t_from + k as f64 * h;
        let g = gap_at(t);
        if g < best_gap {
            best_gap = g;
            best_t = t;
        }
    }
    // golden-section refinement inside the bracketing cell
    let (mut a, mut b) = ((best_t - h).max(t_from), (best_t + h).min(t_to));
    let r = 0.5 * (5f64.sqrt() - 1.0);
    while b - a > 1e-9 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if gap_at(c) < gap_at(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let t_c = 0.5 * (a + b);
    let gap = gap_at(t_c);

    // Away from the crossing the adiabatic levels follow the diabatic ones,
    // with the roles of the two levels exchanged across it.
    let before = level_slope(&basis, t_c - SLOPE_OFFSET, lower);
    let after = level_slope(&basis, t_c + SLOPE_OFFSET, lower);
    let v_scaled = 1.0 / cfg.omega_t;
    let probability = lz_probability(gap, before - after, v_scaled)?;
    Ok(AvoidedCrossing { t_over_t: t_c, gap, slope_lower: before, slope_upper: after, v_scaled, probability })
}

/// One stage of a slip cascade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LzStage {
    /// Time of the avoided crossing, in units of `T`.
    pub t_slip: f64,
    /// Probability of passing it diabatically.
    pub probability: f64,
}

/// Mean quantum slip time `t_0 + sum_p (prod_{k<=p} P_k)(t_{p+1} - t_p)`,
/// keeping only stages that occur within the first period.
pub fn quantum_slip_time(chain: &[LzStage]) -> Result<f64> {
    let first = chain.first().ok_or_else(|| Error::Contract("empty Landau-Zener chain".into()))?;
    if chain.windows(2).any(|w| !(w[1].t_slip >= w[0].t_slip)) {
        return Err(Error::Contract("slip times must be ascending".into()));
    }
    let mut t = first.t_slip;
    let mut weight = 1.0;
    for w in chain.windows(2) {
        if w[1].t_slip > 1.0 {
            break;
        }
        weight *= w[0].probability;
        t += weight * (w[1].t_slip - w[0].t_slip);
    }
    Ok(t)
}

/// `F_max / F0 ~ t_qm / t_cl`.
pub fn quantum_force_from_slip(t_qm: f64, t_cl: f64) -> f64 {
    t_qm / t_cl
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum QuantumAsymptote {
    Value(f64),
    /// Only an upper bound is known.
    UpperBound(f64),
}

impl QuantumAsymptote {
    pub fn value(&self) -> f64 {
        match self {
            QuantumAsymptote::Value(v) | QuantumAsymptote::UpperBound(v) => *v,
        }
    }
}

/// Asymptotic quantum maximum force. Below the level-in-well threshold the
/// two-level value applies; above it only the bound is returned.
pub fn quantum_force_asymptote(eta: f64, lambda_bar: f64, omega_t: f64) -> Result<QuantumAsymptote> {
    require_positive("eta", eta)?;
    require_positive("lambda_bar", lambda_bar)?;
    require_positive("omega_t", omega_t)?;
    if eta <= 1.0 || lambda_bar < lz_threshold(eta)? {
        return Ok(QuantumAsymptote::Value(two_level_bound(eta, lambda_bar, omega_t)));
    }
    Ok(match classify(eta).regime {
        Regime::DeepCorrugation => QuantumAsymptote::UpperBound((2.0 * PI / eta).sin()),
        _ => QuantumAsymptote::UpperBound(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn regimes_are_left_closed() {
        assert_eq!(classify(0.999).regime, Regime::SingleWell);
        assert_eq!(classify(1.0).regime, Regime::StickSlip);
        assert_eq!(classify(DEEP_CORRUGATION_ETA).regime, Regime::DeepCorrugation);
        assert_eq!(classify(4.7).regime, Regime::StickSlip);
        assert_eq!(classify(6.4).regime.as_str(), "deep-corrugation");
    }

    #[test]
    fn classical_asymptote_branches() {
        assert_abs_diff_eq!(classical_force_asymptote(0.1, 100.0).unwrap(), 1.0 + 2.0 * PI / 10.0, epsilon = 1e-12);
        assert_eq!(classical_force_asymptote(2.5, 100.0).unwrap(), 1.0);
        assert_abs_diff_eq!(classical_force_asymptote(6.4, 100.0).unwrap(), 0.831_469_612_302_545, epsilon = 1e-12);
        assert!(classical_force_asymptote(-1.0, 100.0).is_err());
    }

    #[test]
    fn slip_times() {
        assert_abs_diff_eq!(classical_slip_time(2.5).unwrap(), 0.647_887_357_729_738, epsilon = 1e-12);
        assert_abs_diff_eq!(classical_slip_time(DEEP_CORRUGATION_ETA).unwrap(), 1.0, epsilon = 1e-15);
        assert!(classical_slip_time(6.4).unwrap() > 1.0);
        assert_eq!(classical_slip_time(0.5), Err(Error::NoSlip(0.5)));
    }

    #[test]
    fn small_eta_trajectory() {
        assert_eq!(classical_trajectory_small_eta(0.0, 0.1, 100.0), 0.0);
        assert_abs_diff_eq!(classical_trajectory_small_eta(0.5, 0.1, 100.0), 0.502_623_748_5, epsilon = 1e-9);
    }

    #[test]
    fn well_depth_and_threshold() {
        assert_abs_diff_eq!(well_depth(2.5, 1.0).unwrap(), 1.557_85, epsilon = 1e-4);
        assert_abs_diff_eq!(well_depth(6.4, 1.0).unwrap(), 8.5411, epsilon = 1e-3);
        assert_abs_diff_eq!(well_depth(2.5, 0.5).unwrap(), 0.25 * well_depth(2.5, 1.0).unwrap(), epsilon = 1e-14);
        let th = lz_threshold(6.4).unwrap();
        assert!((0.33..=0.35).contains(&th));
        assert_abs_diff_eq!(lz_threshold(2.5).unwrap(), 0.8012, epsilon = 1e-3);
        let large = lz_threshold_large_eta(6.4).unwrap();
        assert_abs_diff_eq!(large, 0.342_35, epsilon = 1e-4);
        assert!((large - th).abs() / th < 0.01);
        assert_eq!(well_depth(1.0, 1.0), Err(Error::NoWell(1.0)));
        assert!(lz_threshold(0.5).is_err());
    }

    #[test]
    fn two_level_force_limits() {
        assert_eq!(two_level_force(0.0, 0.1, 1.0, 100.0), 0.0);
        let bound = two_level_bound(0.1, 1.0, 100.0);
        assert_abs_diff_eq!(bound, 1.407_119_3, epsilon = 1e-6);
        let peak = (0..=20_000)
            .map(|k| two_level_force(k as f64 / 20_000.0, 0.1, 1.0, 100.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(peak <= bound + 1e-9);
        assert!(peak > 0.9 * bound);
    }

    #[test]
    fn lz_probability_limits() {
        assert_eq!(lz_probability(0.0, 2.0, 0.01).unwrap(), 1.0);
        assert!(lz_probability(0.5, 2.0, 1e-9).unwrap() < 1e-300);
        assert_eq!(lz_probability(0.5, 0.0, 0.01), Err(Error::DegenerateSlope));
        assert!(lz_probability(0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn crossing_at_stick_slip_point() {
        let cfg = DimensionlessConfig::default();
        let c = find_avoided_crossing(&cfg, 0, 0.3, 0.7).unwrap();
        assert!((0.4..0.6).contains(&c.t_over_t), "{c:?}");
        assert!(c.gap > 0.0);
        assert!(c.probability > 0.0 && c.probability < 1.0, "{c:?}");
    }

    #[test]
    fn slip_chain_limits() {
        let times = [0.5, 0.6, 0.8, 1.2];
        let chain = |p: f64| times.iter().map(|&t| LzStage { t_slip: t, probability: p }).collect::<Vec<_>>();
        assert_eq!(quantum_slip_time(&chain(0.0)).unwrap(), 0.5);
        assert_abs_diff_eq!(quantum_slip_time(&chain(1.0)).unwrap(), 0.8, epsilon = 1e-15);
        assert_eq!(quantum_slip_time(&chain(0.3)[..1]).unwrap(), 0.5);
        assert!(quantum_slip_time(&[]).is_err());
        assert!(quantum_force_from_slip(0.5, classical_slip_time(2.5).unwrap()) < 1.0);
    }

    #[test]
    fn quantum_asymptote_branches() {
        let v = quantum_force_asymptote(6.4, 0.2, 100.0).unwrap();
        assert!(matches!(v, QuantumAsymptote::Value(_)));
        assert_abs_diff_eq!(v.value(), 0.011_747_9, epsilon = 1e-6);
        assert_eq!(quantum_force_asymptote(2.5, 1.0, 100.0).unwrap(), QuantumAsymptote::UpperBound(1.0));
        let deep = quantum_force_asymptote(20.0, 1.0, 100.0).unwrap();
        assert_eq!(deep, QuantumAsymptote::UpperBound((2.0 * PI / 20.0).sin()));
        assert_abs_diff_eq!(deep.value(), 0.309_017, epsilon = 1e-6);
        assert!(matches!(quantum_force_asymptote(0.1, 1.0, 100.0).unwrap(), QuantumAsymptote::Value(_)));
    }

    proptest! {
        #[test]
        fn quantum_slip_precedes_classical(
            eta in 1.0f64..6.0,
            raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..0.999), 1..8),
        ) {
            let limit = classical_slip_time(eta).unwrap().min(1.0);
            let mut times: Vec<f64> = raw.iter().map(|(u, _)| u * limit * 0.999).collect();
            times.sort_by(f64::total_cmp);
            let chain: Vec<LzStage> = times.iter().zip(&raw)
                .map(|(&t, &(_, p))| LzStage { t_slip: t, probability: p })
                .collect();
            let t = quantum_slip_time(&chain).unwrap();
            prop_assert!(t < limit);
            prop_assert!(t >= chain[0].t_slip);
        }

        #[test]
        fn two_level_never_exceeds_bound(eta in 0.05f64..1.0, lb in 0.2f64..5.0, wt in 20.0f64..400.0) {
            let bound = two_level_bound(eta, lb, wt);
            for k in 0..=2000 {
                prop_assert!(two_level_force(k as f64 / 2000.0, eta, lb, wt) <= bound + 1e-9);
            }
        }
    }
}
