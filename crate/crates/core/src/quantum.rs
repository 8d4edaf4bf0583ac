// SPDX-License-Identifier: Apache-2.0

//! Born-Markov master equation in the moving oscillator basis.
//!
//! ```text
//! d rho / d(Omega t) = -i [H_ren + i K, rho] - ([A, S rho] + h.c.)
//! ```
//!
//! `H_ren = H_S + 2 alpha (omega_c/Omega) A^2`, and `i K = -v p` is the
//! moving-frame term. Every operator except `i K` (and `S` when level
//! shifts are kept) is real, so the density matrix is carried as separate
//! real and imaginary parts and all products are real matrix products.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVectorView};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::{build_S, BathModel, BathOperator, BathRates};
use crate::error::{Error, Result};
use crate::operators::{displacement_matrix, MovingBasis};
use crate::params::DimensionlessConfig;
use crate::spectrum::{diagonalize_symmetric, track_gauge, InstantSpectrum};

/// Pre-normalization trace error that aborts a propagation.
pub const TRACE_ABORT: f64 = 1e-4;

/// Density matrix `rho = re + i im` with `re` symmetric and `im`
/// antisymmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub re: DMatrix<f64>,
    pub im: DMatrix<f64>,
    pub t_over_t: f64,
}

impl DensityMatrix {
    /// `|psi><psi|` for a real state vector.
    pub fn pure(state: DVectorView<'_, f64>, t_over_t: f64) -> Self {
        let n = state.len();
        let re = state * state.transpose();
        Self { re, im: DMatrix::zeros(n, n), t_over_t }
    }

    /// Maximally mixed state `I / N`.
    pub fn maximally_mixed(n: usize, t_over_t: f64) -> Self {
        Self {
            re: DMatrix::identity(n, n) / n as f64,
            im: DMatrix::zeros(n, n),
            t_over_t,
        }
    }

    pub fn from_complex(m: &DMatrix<Complex64>, t_over_t: f64) -> Self {
        Self { re: m.map(|z| z.re), im: m.map(|z| z.im), t_over_t }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.re.zip_map(&self.im, Complex64::new)
    }

    pub fn basis_size(&self) -> usize {
        self.re.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.re.trace()
    }

    /// `Tr rho^2` (equal to the squared Frobenius norm for Hermitian rho).
    pub fn purity(&self) -> f64 {
        self.re.norm_squared() + self.im.norm_squared()
    }

    /// Largest element of `|rho - rho^dagger|`.
    pub fn hermiticity_error(&self) -> f64 {
        let re = (&self.re - self.re.transpose()).amax();
        let im = (&self.im + self.im.transpose()).amax();
        re.max(im)
    }

    /// Smallest eigenvalue, from the real `2N x 2N` embedding
    /// `[[re, -im], [im, re]]` whose spectrum is that of rho doubled.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.basis_size();
        let mut big = DMatrix::zeros(2 * n, 2 * n);
        big.view_mut((0, 0), (n, n)).copy_from(&self.re);
        big.view_mut((n, n), (n, n)).copy_from(&self.re);
        big.view_mut((n, 0), (n, n)).copy_from(&self.im);
        big.view_mut((0, n), (n, n)).copy_from(&(-&self.im));
        big.symmetric_eigenvalues().min()
    }

    /// `Tr(op rho)` for a real symmetric operator.
    pub fn expectation(&self, op: &DMatrix<f64>) -> f64 {
        op.dot(&self.re)
    }

    /// `<v| rho |v>` for a real vector.
    pub fn population(&self, v: DVectorView<'_, f64>) -> f64 {
        (v.transpose() * &self.re * v)[(0, 0)]
    }

    fn axpy(&self, h: f64, k: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            re: &self.re + &k.re * h,
            im: &self.im + &k.im * h,
            t_over_t: self.t_over_t,
        }
    }
}

/// Everything the right-hand side needs at one instant.
#[derive(Debug, Clone)]
pub struct InstantOperators {
    pub t_over_t: f64,
    /// Renormalized Hamiltonian.
    pub h: DMatrix<f64>,
    /// Moving-frame generator `K` (`-v p = i K`); `None` for a frozen trap.
    pub frame: Option<DMatrix<f64>>,
    pub a: DMatrix<f64>,
    pub s: BathOperator,
    /// Raw (untracked) eigendecomposition of `h`.
    pub spectrum: InstantSpectrum,
}

/// Builds [`InstantOperators`] for one configuration.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    basis: MovingBasis,
    rates: BathRates,
    frame: DMatrix<f64>,
    coupled: bool,
}

impl MasterEquation {
    pub fn new(cfg: &DimensionlessConfig, bath: &BathModel) -> Self {
        let basis = MovingBasis::new(cfg);
        let rates = if cfg.lamb_shift && bath.alpha > 0.0 {
            let h0 = basis.renormalized_with_coupling(0.0).0.data;
            let e = h0.clone().symmetric_eigenvalues();
            BathRates::with_level_shift(*bath, 1.5 * (e.max() - e.min()))
        } else {
            BathRates::dissipative(*bath)
        };
        let frame = basis.frame_drift();
        Self { basis, rates, frame, coupled: bath.alpha > 0.0 }
    }

    pub fn basis(&self) -> &MovingBasis {
        &self.basis
    }

    pub fn operators_at(&self, t_over_t: f64) -> InstantOperators {
        let (h, a) = self.basis.renormalized_with_coupling(t_over_t);
        let spectrum = diagonalize_symmetric(h.data.clone(), t_over_t);
        let s = if self.coupled {
            build_S(&spectrum, &a, &self.rates).expect("basis sizes agree by construction")
        } else {
            BathOperator::zeros(self.basis.size())
        };
        InstantOperators { t_over_t, h: h.data, frame: Some(self.frame.clone()), a: a.data, s, spectrum }
    }
}

/// Right-hand side `d rho / d(Omega t)`.
pub fn master_rhs(rho: &DensityMatrix, ops: &InstantOperators) -> DensityMatrix {
    let (r, i) = (&rho.re, &rho.im);

    // Z = (H + iK) rho
    let mut z_re = &ops.h * r;
    let mut z_im = &ops.h * i;
    if let Some(k) = &ops.frame {
        z_re -= k * i;
        z_im += k * r;
    }
    // -i (Z - Z^dagger)
    let mut out_re = &z_im + z_im.transpose();
    let mut out_im = z_re.transpose() - &z_re;

    if ops.s.re.amax() > 0.0 || ops.s.im.is_some() {
        // X = S rho
        let mut x_re = &ops.s.re * r;
        let mut x_im = &ops.s.re * i;
        if let Some(s_im) = &ops.s.im {
            x_re -= s_im * i;
            x_im += s_im * r;
        }
        // W = A X - X A;  subtract W + W^dagger
        let w_re = &ops.a * &x_re - &x_re * &ops.a;
        let w_im = &ops.a * &x_im - &x_im * &ops.a;
        out_re -= &w_re + w_re.transpose();
        out_im -= &w_im - w_im.transpose();
    }
    DensityMatrix { re: out_re, im: out_im, t_over_t: rho.t_over_t }
}

/// Pure projector on the ground state of the renormalized Hamiltonian at t = 0.
pub fn initial_state(cfg: &DimensionlessConfig) -> DensityMatrix {
    let h = MovingBasis::new(cfg).renormalized_with_coupling(0.0).0;
    let spec = diagonalize_symmetric(h.data, 0.0);
    DensityMatrix::pure(spec.states.column(0), 0.0)
}

/// `(2 pi / eta) Tr[(t/T - x/a) rho]` in units of `F0 = pi U0 / a`.
pub fn lateral_force(rho: &DensityMatrix, cfg: &DimensionlessConfig) -> f64 {
    let d = displacement_matrix(rho.basis_size(), cfg.lambda_bar);
    2.0 * PI / cfg.eta * rho.expectation(&d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    /// Population of the instantaneous ground state.
    pub p0: f64,
    /// Linear entropy `N/(N-1) (1 - Tr rho^2)`.
    pub s_l: f64,
    pub purity: f64,
}

/// Ground-state population (column 0 of the tracked spectrum) and linear entropy.
pub fn observables(rho: &DensityMatrix, spec: &InstantSpectrum, cfg: &DimensionlessConfig) -> Observables {
    let n = cfg.n_max as f64;
    let purity = rho.purity();
    Observables {
        p0: rho.population(spec.states.column(0)),
        s_l: n / (n - 1.0) * (1.0 - purity),
        purity,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumSample {
    pub t_over_t: f64,
    pub mean_x_over_a: f64,
    pub force_over_f0: f64,
    pub p0: f64,
    pub s_l: f64,
    pub purity: f64,
    pub min_eigenvalue: f64,
    /// `|Tr rho - 1|` before the step's renormalization.
    pub trace_error: f64,
}

/// Health metrics collected along a propagation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationDiagnostics {
    pub steps: usize,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
    pub max_hermiticity_error: f64,
    pub ambiguous_assignments: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumTrajectory {
    pub samples: Vec<QuantumSample>,
    pub cfg: DimensionlessConfig,
    pub diagnostics: PropagationDiagnostics,
    pub final_state: DensityMatrix,
}

/// Fixed-step RK4 over `n_periods` drive periods.
///
/// Operators and `S` are rebuilt at every stage time; the trace is
/// renormalized once per step and the pre-normalization error is the
/// step-size health metric.
pub fn propagate(rho0: &DensityMatrix, cfg: &DimensionlessConfig, bath: &BathModel) -> Result<QuantumTrajectory> {
    cfg.validate()?;
    bath.validate()?;
    if rho0.basis_size() != cfg.n_max {
        return Err(Error::Contract(format!(
            "initial state size {} vs n_max {}",
            rho0.basis_size(),
            cfg.n_max
        )));
    }
    let engine = MasterEquation::new(cfg, bath);
    let disp = engine.basis().displacement().data;
    let total = cfg.n_steps * cfg.n_periods;
    let dt = 1.0 / cfg.n_steps as f64;
    let h = cfg.omega_t * dt;
    let force_scale = 2.0 * PI / cfg.eta;

    let mut rho = rho0.clone();
    let mut ops = engine.operators_at(rho.t_over_t);
    let mut tracked = ops.spectrum.clone();
    let mut diag = PropagationDiagnostics {
        steps: total,
        max_trace_error: 0.0,
        min_eigenvalue: rho.min_eigenvalue(),
        max_hermiticity_error: rho.hermiticity_error(),
        ambiguous_assignments: 0,
    };

    let record = |rho: &DensityMatrix, tracked: &InstantSpectrum, trace_error: f64, min_eigenvalue: f64| {
        let obs = observables(rho, tracked, cfg);
        let disp_mean = rho.expectation(&disp);
        QuantumSample {
            t_over_t: rho.t_over_t,
            mean_x_over_a: rho.t_over_t - disp_mean,
            force_over_f0: force_scale * disp_mean,
            p0: obs.p0,
            s_l: obs.s_l,
            purity: obs.purity,
            min_eigenvalue,
            trace_error,
        }
    };
    let mut samples = vec![record(&rho, &tracked, 0.0, diag.min_eigenvalue)];
    let t_start = rho.t_over_t;

    for step in 0..total {
        let t_n = t_start + step as f64 * dt;
        let t_mid = t_n + 0.5 * dt;
        let t_next = t_start + (step + 1) as f64 * dt;

        let k1 = master_rhs(&rho, &ops);
        let mid = engine.operators_at(t_mid);
        let k2 = master_rhs(&rho.axpy(0.5 * h, &k1), &mid);
        let k3 = master_rhs(&rho.axpy(0.5 * h, &k2), &mid);
        let next = engine.operators_at(t_next);
        let k4 = master_rhs(&rho.axpy(h, &k3), &next);

        rho.re += (&k1.re + (&k2.re + &k3.re) * 2.0 + &k4.re) * (h / 6.0);
        rho.im += (&k1.im + (&k2.im + &k3.im) * 2.0 + &k4.im) * (h / 6.0);
        rho.t_over_t = t_next;

        let tr = rho.trace();
        let trace_error = (tr - 1.0).abs();
        diag.max_trace_error = diag.max_trace_error.max(trace_error);
        if !(trace_error <= TRACE_ABORT) {
            return Err(Error::TraceDrift { error: trace_error, t_over_t: t_next });
        }
        rho.re /= tr;
        rho.im /= tr;

        tracked = track_gauge(&tracked, next.spectrum.clone())?;
        diag.ambiguous_assignments += tracked.ambiguous;
        ops = next;

        if (step + 1) % cfg.record_stride == 0 || step + 1 == total {
            let min_eig = rho.min_eigenvalue();
            diag.min_eigenvalue = diag.min_eigenvalue.min(min_eig);
            diag.max_hermiticity_error = diag.max_hermiticity_error.max(rho.hermiticity_error());
            if min_eig < cfg.positivity_floor {
                return Err(Error::Positivity { min_eigenvalue: min_eig, t_over_t: t_next });
            }
            samples.push(record(&rho, &tracked, trace_error, min_eig));
        }
    }

    Ok(QuantumTrajectory { samples, cfg: cfg.clone(), diagnostics: diag, final_state: rho })
}

/// Extrema of the recorded observables within the first period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstPeriodSummary {
    pub f_max: f64,
    /// Time of the force maximum.
    pub t_at_f_max: f64,
    pub p0_min: f64,
    pub sl_max: f64,
}

pub fn summarize_first_period(traj: &QuantumTrajectory) -> Result<FirstPeriodSummary> {
    summarize_samples(&traj.samples)
}

pub(crate) fn summarize_samples(samples: &[QuantumSample]) -> Result<FirstPeriodSummary> {
    const EDGE: f64 = 1e-9;
    let covers = samples.first().is_some_and(|s| s.t_over_t <= EDGE)
        && samples.iter().any(|s| s.t_over_t >= 1.0 - EDGE);
    if !covers {
        return Err(Error::Contract("trajectory does not cover the first period".into()));
    }
    let mut out = FirstPeriodSummary {
        f_max: f64::NEG_INFINITY,
        t_at_f_max: 0.0,
        p0_min: f64::INFINITY,
        sl_max: f64::NEG_INFINITY,
    };
    for s in samples.iter().filter(|s| s.t_over_t <= 1.0 + EDGE) {
        if s.force_over_f0 > out.f_max {
            out.f_max = s.force_over_f0;
            out.t_at_f_max = s.t_over_t;
        }
        out.p0_min = out.p0_min.min(s.p0);
        out.sl_max = out.sl_max.max(s.s_l);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(eta: f64, lambda_bar: f64, alpha: f64) -> DimensionlessConfig {
        DimensionlessConfig { eta, lambda_bar, alpha, ..Default::default() }
    }

    #[test]
    fn initial_state_properties() {
        let c = cfg(1e-12, 1.0, 0.0);
        let rho = initial_state(&c);
        assert_abs_diff_eq!(rho.re[(0, 0)].abs(), 1.0, epsilon = 1e-10);
        let c = cfg(2.5, 1.0, 0.01);
        let rho = initial_state(&c);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        let ops = MasterEquation::new(&c, &BathModel::from_config(&c)).operators_at(0.0);
        let obs = observables(&rho, &ops.spectrum, &c);
        assert_abs_diff_eq!(obs.p0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(obs.s_l, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn maximally_mixed_entropy() {
        let c = cfg(2.5, 1.0, 0.01);
        let rho = DensityMatrix::maximally_mixed(c.n_max, 0.0);
        let ops = MasterEquation::new(&c, &BathModel::from_config(&c)).operators_at(0.0);
        assert_abs_diff_eq!(observables(&rho, &ops.spectrum, &c).s_l, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.min_eigenvalue(), 1.0 / 25.0, epsilon = 1e-12);
    }

    #[test]
    fn centred_state_has_no_force() {
        // The bare oscillator ground state is centred on the trap.
        let c = cfg(2.5, 1.0, 0.0);
        let mut v = nalgebra::DVector::zeros(c.n_max);
        v[0] = 1.0;
        assert_eq!(lateral_force(&DensityMatrix::pure(v.as_view(), 0.3), &c), 0.0);
    }

    #[test]
    fn unitary_rhs_without_bath() {
        let c = cfg(2.5, 1.0, 0.0);
        let eng = MasterEquation::new(&c, &BathModel::from_config(&c));
        let ops = eng.operators_at(0.3);
        let rho = initial_state(&c);
        let rhs = master_rhs(&rho, &ops);
        // -i[H + iK, rho] by direct complex arithmetic
        let hc = ops.h.map(|x| Complex64::new(x, 0.0))
            + ops.frame.as_ref().unwrap().map(|x| Complex64::new(0.0, x));
        let rc = rho.to_complex();
        let want = (&hc * &rc - &rc * &hc) * Complex64::new(0.0, -1.0);
        assert!((rhs.to_complex() - want).camax() < 1e-12);
    }

    #[test]
    fn dissipative_rhs_against_complex_formula() {
        let c = DimensionlessConfig { lamb_shift: true, theta: 0.7, ..cfg(2.5, 1.0, 0.05) };
        let eng = MasterEquation::new(&c, &BathModel::from_config(&c));
        let ops = eng.operators_at(0.41);
        assert!(ops.s.im.is_some());
        // arbitrary Hermitian trace-one state
        let m = DMatrix::from_fn(c.n_max, c.n_max, |i, j| {
            Complex64::new(((i * 3 + j * 5) % 7) as f64, ((i * 2 + j) % 5) as f64 - 2.0)
        });
        let mut rc = &m * m.adjoint();
        let tr = rc.trace();
        rc /= tr;
        let rho = DensityMatrix::from_complex(&rc, 0.41);
        let rhs = master_rhs(&rho, &ops);

        let hc = ops.h.map(|x| Complex64::new(x, 0.0))
            + ops.frame.as_ref().unwrap().map(|x| Complex64::new(0.0, x));
        let ac = ops.a.map(|x| Complex64::new(x, 0.0));
        let sc = ops.s.to_complex();
        let coherent = (&hc * &rc - &rc * &hc) * Complex64::new(0.0, -1.0);
        let comm = &ac * (&sc * &rc) - (&sc * &rc) * &ac;
        let want = coherent - (&comm + comm.adjoint());
        assert!((rhs.to_complex() - want).camax() < 1e-12);
        assert!(rhs.trace().abs() < 1e-10);
        assert!(rhs.hermiticity_error() < 1e-13);
    }

    #[test]
    fn relaxes_to_gibbs_state_with_frozen_trap() {
        let c = DimensionlessConfig { n_max: 3, theta: 1.0, ..cfg(2.5, 1.0, 0.01) };
        let eng = MasterEquation::new(&c, &BathModel::from_config(&c));
        let mut ops = eng.operators_at(0.3);
        ops.frame = None;
        let mut rho = DensityMatrix::pure(ops.spectrum.states.column(2), 0.3);
        let h = 0.05;
        for _ in 0..400_000 {
            let k1 = master_rhs(&rho, &ops);
            let k2 = master_rhs(&rho.axpy(0.5 * h, &k1), &ops);
            let k3 = master_rhs(&rho.axpy(0.5 * h, &k2), &ops);
            let k4 = master_rhs(&rho.axpy(h, &k3), &ops);
            rho.re += (&k1.re + (&k2.re + &k3.re) * 2.0 + &k4.re) * (h / 6.0);
            rho.im += (&k1.im + (&k2.im + &k3.im) * 2.0 + &k4.im) * (h / 6.0);
        }
        let e = &ops.spectrum.energies;
        let z: f64 = e.iter().map(|x| (-(x - e[0]) / c.theta).exp()).sum();
        for p in 0..3 {
            let gibbs = (-(e[p] - e[0]) / c.theta).exp() / z;
            let got = rho.population(ops.spectrum.states.column(p));
            assert!((got - gibbs).abs() < 0.02 * gibbs.max(0.05), "p = {p}: {got} vs {gibbs}");
        }
    }

    #[test]
    fn summary_extrema_and_coverage() {
        let sample = |t: f64, f: f64| QuantumSample {
            t_over_t: t,
            mean_x_over_a: 0.0,
            force_over_f0: f,
            p0: 1.0 - t / 2.0,
            s_l: t / 4.0,
            purity: 1.0,
            min_eigenvalue: 0.0,
            trace_error: 0.0,
        };
        let flat: Vec<_> = (0..=10).map(|k| sample(k as f64 / 10.0, 0.42)).collect();
        let s = summarize_samples(&flat).unwrap();
        assert_eq!(s.f_max, 0.42);
        assert_abs_diff_eq!(s.p0_min, 0.5);
        assert_abs_diff_eq!(s.sl_max, 0.25);

        let mut two: Vec<_> = (0..=20).map(|k| sample(k as f64 / 10.0, k as f64)).collect();
        let s = summarize_samples(&two).unwrap();
        assert_eq!(s.f_max, 10.0);
        two.truncate(5);
        assert!(summarize_samples(&two).is_err());
    }
}
