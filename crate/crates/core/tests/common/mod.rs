// SPDX-License-Identifier: Apache-2.0

//! Quadrature reference for moving-basis matrix elements, built without
//! any of the closed forms used by the library.

#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

/// Normalized oscillator eigenfunctions `h_0..h_{n-1}` at `y` (unit length scale).
pub fn hermite_functions(n: usize, y: f64) -> Vec<f64> {
    let mut h = vec![0.0; n.max(2)];
    h[0] = PI.powf(-0.25) * (-0.5 * y * y).exp();
    h[1] = 2f64.sqrt() * y * h[0];
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        h[k + 1] = (2.0 / (kf + 1.0)).sqrt() * y * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
    }
    h.truncate(n);
    h
}

/// Gauss-Hermite rule stored as nodes and weights for plain `dy` integrals
/// of products of Hermite functions.
pub struct HermiteRule {
    pub nodes: Vec<f64>,
    /// `w_i exp(y_i^2)`, i.e. `1 / sum_k h_k(y_i)^2`.
    pub weights: Vec<f64>,
}

impl HermiteRule {
    /// Golub-Welsch nodes polished with Newton steps on `h_n`.
    pub fn new(n: usize) -> Self {
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i.abs_diff(j) == 1 {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        for y in nodes.iter_mut() {
            for _ in 0..3 {
                let h = hermite_functions(n + 1, *y);
                let deriv = (2.0 * n as f64).sqrt() * h[n - 1] - *y * h[n];
                if deriv != 0.0 {
                    *y -= h[n] / deriv;
                }
            }
        }
        let weights = nodes
            .iter()
            .map(|&y| 1.0 / hermite_functions(n, y).iter().map(|v| v * v).sum::<f64>())
            .collect();
        Self { nodes, weights }
    }

    /// `int h_p(y) h_q(y) f(y) dy` for all `p, q < size`.
    pub fn matrix<F: Fn(f64) -> f64>(&self, size: usize, f: F) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(size, size);
        for (&y, &w) in self.nodes.iter().zip(&self.weights) {
            let h = hermite_functions(size, y);
            let fw = w * f(y);
            for p in 0..size {
                for q in 0..size {
                    m[(p, q)] += fw * h[p] * h[q];
                }
            }
        }
        m
    }
}

/// Moving-basis elements of `g(2 pi x / a)` at drive phase `t/T`.
///
/// With `y` the offset from the trap centre in oscillator lengths,
/// `2 pi x / a = 2 pi t/T + y / lambda_bar`.
pub fn phase_operator<G: Fn(f64) -> f64>(
    rule: &HermiteRule,
    size: usize,
    lambda_bar: f64,
    t_over_t: f64,
    g: G,
) -> DMatrix<f64> {
    rule.matrix(size, |y| g(2.0 * PI * t_over_t + y / lambda_bar))
}

/// Moving-basis elements of `t/T - x/a = -y / (2 pi lambda_bar)`.
pub fn displacement_operator(rule: &HermiteRule, size: usize, lambda_bar: f64) -> DMatrix<f64> {
    rule.matrix(size, |y| -y / (2.0 * PI * lambda_bar))
}

/// Largest root of `u = eta sin u` by plain bisection on `(0, pi]`.
pub fn bisect_u_eta(eta: f64) -> f64 {
    let f = |u: f64| u - eta * u.sin();
    let (mut lo, mut hi) = (1e-9, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
