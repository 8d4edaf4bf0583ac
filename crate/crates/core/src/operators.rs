// SPDX-License-Identifier: Apache-2.0

//! Matrices in the moving harmonic-oscillator basis `phi_p(x - v t)`.
//!
//! All position-dependent operators are functions of `2 pi x / a`. Writing
//! `x = x_c + xi` with the trap centre `x_c = v t`, the moving-basis elements
//! of `exp(i 2 pi x / a)` are `exp(i 2 pi t/T) i^d G_{pq}` with
//! `d = |p - q|` and
//!
//! ```text
//! G_{pq} = sqrt(min!/max!) exp(-beta^2/2) beta^d L_min^d(beta^2),  beta^2 = lambda_bar^-2 / 2
//! ```
//!
//! The corrugation, coupling and cosine operators are its real and
//! imaginary parts, so every operator built here is real symmetric.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;

use crate::params::DimensionlessConfig;
use crate::special::{laguerre_table, ln_factorials};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Dimensionless corrugation `V = -cos(2 pi x / a)`.
    Corrugation,
    /// `H_S` in units of `hbar Omega`.
    System,
    /// Bath coupling `A = sin(2 pi x / a)`.
    Coupling,
    /// `A^2`.
    CouplingSquared,
    /// `H_S + 2 alpha (omega_c/Omega) A^2`.
    Renormalized,
    /// `t/T - x/a`.
    Displacement,
    /// `cos(2 pi x / a)`.
    Cosine,
}

/// A real symmetric matrix in the moving basis, tagged with its build time.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub data: DMatrix<f64>,
    pub t_over_t: f64,
    pub kind: OperatorKind,
}

impl OperatorMatrix {
    pub fn basis_size(&self) -> usize {
        self.data.nrows()
    }

    /// Largest `|M_ij - M_ji|`.
    pub fn hermiticity_error(&self) -> f64 {
        asymmetry(&self.data)
    }
}

pub(crate) fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Precomputed `lambda_bar`-dependent coefficients for one configuration.
///
/// `signed_overlap[(p, q)]` stores `(-1)^floor(d/2) G_{pq}`; only the
/// drive-phase trigonometric factor changes with time.
#[derive(Debug, Clone)]
pub struct MovingBasis {
    n: usize,
    eta: f64,
    lambda_bar: f64,
    omega_t: f64,
    renorm: f64,
    signed_overlap: DMatrix<f64>,
}

impl MovingBasis {
    pub fn new(cfg: &DimensionlessConfig) -> Self {
        let n = cfg.n_max;
        let beta2 = 0.5 / (cfg.lambda_bar * cfg.lambda_bar);
        let laguerre = laguerre_table(n, beta2);
        let ln_fact = ln_factorials(n);
        let signed_overlap = DMatrix::from_fn(n, n, |p, q| {
            let (lo, hi) = (p.min(q), p.max(q));
            let d = hi - lo;
            let ln_mag =
                0.5 * (ln_fact[lo] - ln_fact[hi]) - 0.5 * beta2 + 0.5 * d as f64 * beta2.ln();
            let sign = if (d / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sign * ln_mag.exp() * laguerre[d][lo]
        });
        Self {
            n,
            eta: cfg.eta,
            lambda_bar: cfg.lambda_bar,
            omega_t: cfg.omega_t,
            renorm: 2.0 * cfg.alpha * cfg.omega_c_ratio,
            signed_overlap,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Element-wise `G` times `even` or `odd` depending on the parity of `|p - q|`.
    fn parity_weighted(&self, even: f64, odd: f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |p, q| {
            let w = if p.abs_diff(q) % 2 == 0 { even } else { odd };
            w * self.signed_overlap[(p, q)]
        })
    }

    fn phase(t_over_t: f64) -> (f64, f64) {
        (2.0 * PI * t_over_t).sin_cos()
    }

    pub fn corrugation(&self, t_over_t: f64) -> OperatorMatrix {
        let (s, c) = Self::phase(t_over_t);
        OperatorMatrix {
            data: self.parity_weighted(-c, s),
            t_over_t,
            kind: OperatorKind::Corrugation,
        }
    }

    pub fn cosine(&self, t_over_t: f64) -> OperatorMatrix {
        let (s, c) = Self::phase(t_over_t);
        OperatorMatrix { data: self.parity_weighted(c, -s), t_over_t, kind: OperatorKind::Cosine }
    }

    pub fn coupling(&self, t_over_t: f64) -> OperatorMatrix {
        let (s, c) = Self::phase(t_over_t);
        OperatorMatrix { data: self.parity_weighted(s, c), t_over_t, kind: OperatorKind::Coupling }
    }

    pub fn system(&self, t_over_t: f64) -> OperatorMatrix {
        let scale = self.eta * self.lambda_bar * self.lambda_bar;
        let mut data = self.corrugation(t_over_t).data * scale;
        for p in 0..self.n {
            data[(p, p)] += p as f64 + 0.5 + scale;
        }
        OperatorMatrix { data, t_over_t, kind: OperatorKind::System }
    }

    /// Renormalized Hamiltonian and the coupling operator it was built from.
    pub fn renormalized_with_coupling(&self, t_over_t: f64) -> (OperatorMatrix, OperatorMatrix) {
        let a = self.coupling(t_over_t);
        let mut h = self.system(t_over_t);
        if self.renorm != 0.0 {
            h.data += (&a.data * &a.data) * self.renorm;
        }
        h.kind = OperatorKind::Renormalized;
        (h, a)
    }

    pub fn displacement(&self) -> OperatorMatrix {
        OperatorMatrix {
            data: displacement_matrix(self.n, self.lambda_bar),
            t_over_t: 0.0,
            kind: OperatorKind::Displacement,
        }
    }

    /// Generator `K` of the moving-frame term `-v p = i K` (units `hbar Omega`).
    ///
    /// The basis functions follow the trap, so in this basis the
    /// Schrodinger equation picks up `-v p`. It is purely imaginary,
    /// hence stored through its real antisymmetric `K`.
    pub fn frame_drift(&self) -> DMatrix<f64> {
        let c = 2.0 * PI * self.lambda_bar / self.omega_t / SQRT_2;
        let mut k = DMatrix::zeros(self.n, self.n);
        for p in 0..self.n - 1 {
            let v = c * ((p + 1) as f64).sqrt();
            k[(p + 1, p)] = -v;
            k[(p, p + 1)] = v;
        }
        k
    }
}

/// `t/T - x/a = -xi/a`, tridiagonal and time independent in the moving basis.
pub fn displacement_matrix(n: usize, lambda_bar: f64) -> DMatrix<f64> {
    let scale = -1.0 / (2.0 * SQRT_2 * PI * lambda_bar);
    let mut data = DMatrix::zeros(n, n);
    for p in 1..n {
        let v = scale * (p as f64).sqrt();
        data[(p - 1, p)] = v;
        data[(p, p - 1)] = v;
    }
    data
}

#[allow(non_snake_case)]
pub fn build_V(t_over_t: f64, cfg: &DimensionlessConfig) -> OperatorMatrix {
    MovingBasis::new(cfg).corrugation(t_over_t)
}

#[allow(non_snake_case)]
pub fn build_HS(t_over_t: f64, cfg: &DimensionlessConfig) -> OperatorMatrix {
    MovingBasis::new(cfg).system(t_over_t)
}

#[allow(non_snake_case)]
pub fn build_A(t_over_t: f64, cfg: &DimensionlessConfig) -> OperatorMatrix {
    MovingBasis::new(cfg).coupling(t_over_t)
}

pub fn build_renormalized_h(t_over_t: f64, cfg: &DimensionlessConfig) -> OperatorMatrix {
    MovingBasis::new(cfg).renormalized_with_coupling(t_over_t).0
}

pub fn build_displacement(t_over_t: f64, cfg: &DimensionlessConfig) -> OperatorMatrix {
    let mut d = MovingBasis::new(cfg).displacement();
    d.t_over_t = t_over_t;
    d
}
