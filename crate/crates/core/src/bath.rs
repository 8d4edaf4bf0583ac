// SPDX-License-Identifier: Apache-2.0

//! Ohmic bath: spectral density, Bose-Einstein occupation, transition
//! rates and the bath-convoluted operator `S(t)`.
//!
//! Working units are `hbar = Omega = 1`, so energies and frequencies are
//! interchangeable. With `g(w) = f_BE(w) J(w)` the rate is
//!
//! ```text
//! Gamma(E) = pi g(-E) + i P∫ g(w) / (w + E) dw
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::OperatorMatrix;
use crate::params::DimensionlessConfig;
use crate::spectrum::InstantSpectrum;

/// Above this `w / theta` the occupation is treated as zero.
const OCCUPATION_CUTOFF: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathModel {
    pub alpha: f64,
    pub omega_c_ratio: f64,
    pub theta: f64,
}

impl BathModel {
    pub fn new(alpha: f64, omega_c_ratio: f64, theta: f64) -> Result<Self> {
        let b = Self { alpha, omega_c_ratio, theta };
        b.validate()?;
        Ok(b)
    }

    pub fn from_config(cfg: &DimensionlessConfig) -> Self {
        Self { alpha: cfg.alpha, omega_c_ratio: cfg.omega_c_ratio, theta: cfg.theta }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !(self.omega_c_ratio > 0.0) || !(self.theta >= 0.0) {
            return Err(Error::Config(format!("invalid bath model {self:?}")));
        }
        Ok(())
    }

    /// `f_BE(w) J(w)`, regular at `w = 0` and valid at `theta = 0`.
    fn weighted_density(&self, w: f64) -> f64 {
        let cutoff = (-w.abs() / self.omega_c_ratio).exp();
        if self.theta == 0.0 {
            return if w < 0.0 { -2.0 * self.alpha * w * cutoff } else { 0.0 };
        }
        let x = w / self.theta;
        if x > OCCUPATION_CUTOFF {
            0.0
        } else if x.abs() < 1e-8 {
            2.0 * self.alpha * self.theta * cutoff * (1.0 - 0.5 * x)
        } else {
            2.0 * self.alpha * w * cutoff / x.exp_m1()
        }
    }
}

/// Ohmic spectral density `2 alpha w exp(-|w| / omega_c)`.
pub fn spectral_density(w: f64, b: &BathModel) -> f64 {
    2.0 * b.alpha * w * (-w.abs() / b.omega_c_ratio).exp()
}

/// Bose-Einstein occupation `1 / (exp(w / theta) - 1)` for `w > 0`.
pub fn bose_einstein(w: f64, theta: f64) -> f64 {
    if theta == 0.0 || w / theta > OCCUPATION_CUTOFF {
        0.0
    } else {
        1.0 / (w / theta).exp_m1()
    }
}

/// Dissipative part of the bath rate, `pi f_BE(-E) J(-E)`.
///
/// `E > 0` is emission into the bath, `E < 0` absorption; `E = 0`
/// gives the limit `2 pi alpha theta`.
pub fn dissipative_rate(e: f64, b: &BathModel) -> f64 {
    std::f64::consts::PI * b.weighted_density(-e)
}

/// Bath-induced transition rate; the principal-value part is dropped.
pub fn transition_rate(e: f64, b: &BathModel) -> Complex64 {
    Complex64::new(dissipative_rate(e, b), 0.0)
}

/// Principal-value level shift `P∫ g(w) / (w + E) dw`.
///
/// Evaluated as `∫_0^∞ [g(u - E) - g(-u - E)] / u du` on Gauss-Legendre
/// panels.
pub fn level_shift(e: f64, b: &BathModel) -> f64 {
    if b.alpha == 0.0 {
        return 0.0;
    }
    let h = |u: f64| {
        if u < 1e-12 {
            // Symmetric difference quotient at the origin.
            let du = 1e-6;
            (b.weighted_density(du - e) - b.weighted_density(-du - e)) / du
        } else {
            (b.weighted_density(u - e) - b.weighted_density(-u - e)) / u
        }
    };
    // Fine panels up to a few thermal widths past the kink at u = |E|,
    // then panels on the cutoff scale.
    let kink = e.abs();
    let knee = kink + 5.0;
    let upper = knee + 80.0 * b.omega_c_ratio;
    let tail_width = (b.omega_c_ratio / 20.0).min(0.5);
    let near = gauss_legendre(&h, 0.0, kink, ((kink / 0.02).ceil() as usize).max(1));
    let mid = gauss_legendre(&h, kink, knee, 100);
    let far = gauss_legendre(&h, knee, upper, ((upper - knee) / tail_width).ceil() as usize);
    near + mid + far
}

fn gauss_legendre(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.0,
        0.538_469_310_105_683_1,
        -0.538_469_310_105_683_1,
        0.906_179_845_938_664,
        -0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    if b <= a {
        return 0.0;
    }
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * width;
            X.iter().zip(&W).map(|(x, w)| w * f(mid + 0.5 * width * x)).sum::<f64>() * 0.5 * width
        })
        .sum()
}

/// Rate function used when assembling `S`: dissipative only, or with a
/// tabulated level shift.
#[derive(Debug, Clone)]
pub struct BathRates {
    model: BathModel,
    shift: Option<ShiftTable>,
}

#[derive(Debug, Clone)]
struct ShiftTable {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl ShiftTable {
    fn new(model: &BathModel, span: f64, points: usize) -> Self {
        let lo = -span;
        let step = 2.0 * span / (points - 1) as f64;
        let values = (0..points).into_par_iter().map(|k| level_shift(lo + k as f64 * step, model)).collect();
        Self { lo, step, values }
    }

    /// Catmull-Rom interpolation; `None` outside the tabulated span.
    fn eval(&self, e: f64) -> Option<f64> {
        let pos = (e - self.lo) / self.step;
        let n = self.values.len();
        if !(pos >= 1.0) || pos > (n - 3) as f64 {
            return None;
        }
        let k = pos.floor() as usize;
        let s = pos - k as f64;
        let (p0, p1, p2, p3) =
            (self.values[k - 1], self.values[k], self.values[k + 1], self.values[k + 2]);
        Some(
            p1 + 0.5
                * s
                * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + s * (3.0 * (p1 - p2) + p3 - p0))),
        )
    }
}

impl BathRates {
    pub fn dissipative(model: BathModel) -> Self {
        Self { model, shift: None }
    }

    /// Tabulates the level shift over `|E| <= span`.
    pub fn with_level_shift(model: BathModel, span: f64) -> Self {
        let span = span.max(1.0) + 1.0;
        Self { model, shift: Some(ShiftTable::new(&model, span, 4001)) }
    }

    pub fn model(&self) -> &BathModel {
        &self.model
    }

    pub fn has_shift(&self) -> bool {
        self.shift.is_some()
    }

    pub fn rate(&self, e: f64) -> Complex64 {
        let re = dissipative_rate(e, &self.model);
        let im = match &self.shift {
            None => 0.0,
            Some(table) => table.eval(e).unwrap_or_else(|| level_shift(e, &self.model)),
        };
        Complex64::new(re, im)
    }
}

/// `S` in the moving basis, split into real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct BathOperator {
    pub re: DMatrix<f64>,
    /// `None` when every rate is real.
    pub im: Option<DMatrix<f64>>,
}

impl BathOperator {
    pub fn zeros(n: usize) -> Self {
        Self { re: DMatrix::zeros(n, n), im: None }
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.re.nrows(), self.re.ncols(), |i, j| {
            Complex64::new(self.re[(i, j)], self.im.as_ref().map_or(0.0, |m| m[(i, j)]))
        })
    }
}

/// Bath-convoluted operator `S = sum <p|A|q> Gamma(E_q - E_p) |p><q|`,
/// rotated back to the moving basis.
#[allow(non_snake_case)]
pub fn build_S(spec: &InstantSpectrum, a: &OperatorMatrix, rates: &BathRates) -> Result<BathOperator> {
    let n = spec.len();
    if a.basis_size() != n || spec.states.nrows() != n {
        return Err(Error::Contract(format!(
            "build_S: spectrum size {n} vs operator size {}",
            a.basis_size()
        )));
    }
    if rates.model.alpha == 0.0 {
        return Ok(BathOperator::zeros(n));
    }
    let u = &spec.states;
    let a_eig = u.transpose() * &a.data * u;
    let mut m_re = DMatrix::zeros(n, n);
    let mut m_im = rates.has_shift().then(|| DMatrix::zeros(n, n));
    for q in 0..n {
        for p in 0..n {
            let g = rates.rate(spec.energies[q] - spec.energies[p]);
            m_re[(p, q)] = a_eig[(p, q)] * g.re;
            if let Some(m) = m_im.as_mut() {
                m[(p, q)] = a_eig[(p, q)] * g.im;
            }
        }
    }
    let ut = u.transpose();
    Ok(BathOperator {
        re: u * m_re * &ut,
        im: m_im.map(|m| u * m * &ut),
    })
}
