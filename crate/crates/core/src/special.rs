// SPDX-License-Identifier: Apache-2.0

//! Associated Laguerre polynomials and the `u = eta sin u` root.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `L_n^k(x)` by the three-term recurrence in `n`.
pub fn assoc_laguerre(n: usize, k: usize, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Laguerre argument must be finite and >= 0, got {x}")));
    }
    Ok(laguerre_upto(n, k as f64, x)[n])
}

/// Values `L_0^k(x) ..= L_n^k(x)`.
fn laguerre_upto(n: usize, k: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 + k - x);
    for m in 1..n {
        let m_f = m as f64;
        let next = ((2.0 * m_f + 1.0 + k - x) * out[m] - (m_f + k) * out[m - 1]) / (m_f + 1.0);
        out.push(next);
    }
    out
}

/// Table `t[k][n] = L_n^k(x)` for `n, k < size`.
pub fn laguerre_table(size: usize, x: f64) -> Vec<Vec<f64>> {
    (0..size)
        .map(|k| if size == 0 { Vec::new() } else { laguerre_upto(size - 1, k as f64, x) })
        .collect()
}

/// `ln(n!)` for `n < size`.
pub fn ln_factorials(size: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(size);
    let mut acc = 0.0;
    for n in 0..size {
        if n > 1 {
            acc += (n as f64).ln();
        }
        out.push(acc);
    }
    out
}

/// Root of `u - eta sin(u) = 0` inside `(0, pi)`.
///
/// Bracketed bisection followed by Newton polishing; the returned root
/// satisfies `|u - eta sin u| < 1e-12`.
pub fn solve_u_eta(eta: f64) -> Result<f64> {
    if !(eta > 1.0) || !eta.is_finite() {
        return Err(Error::NoInteriorRoot(eta));
    }
    let f = |u: f64| u - eta * u.sin();
    // f < 0 just above the origin: below the cubic estimate of the root.
    let mut lo = (0.5 * (6.0 * (eta - 1.0) / eta).sqrt()).min(0.5 * PI);
    let mut hi = PI;
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..20 {
        let fu = f(u);
        if fu.abs() < 1e-13 {
            break;
        }
        let step = fu / (1.0 - eta * u.cos());
        let next = u - step;
        if !(next > lo - 1e-9 && next < hi + 1e-9) {
            break;
        }
        u = next;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Explicit low-degree forms, independent of the recurrence.
    fn explicit(n: usize, k: f64, x: f64) -> f64 {
        match n {
            0 => 1.0,
            1 => 1.0 + k - x,
            2 => 0.5 * (x * x - 2.0 * (k + 2.0) * x + (k + 1.0) * (k + 2.0)),
            3 => {
                (-x.powi(3) + 3.0 * (k + 3.0) * x * x - 3.0 * (k + 2.0) * (k + 3.0) * x
                    + (k + 1.0) * (k + 2.0) * (k + 3.0))
                    / 6.0
            }
            4 => {
                (x.powi(4) - 4.0 * (k + 4.0) * x.powi(3) + 6.0 * (k + 3.0) * (k + 4.0) * x * x
                    - 4.0 * (k + 2.0) * (k + 3.0) * (k + 4.0) * x
                    + (k + 1.0) * (k + 2.0) * (k + 3.0) * (k + 4.0))
                    / 24.0
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(assoc_laguerre(0, 7, 3.3).unwrap(), 1.0);
        assert_abs_diff_eq!(assoc_laguerre(1, 1, 0.5).unwrap(), 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(assoc_laguerre(2, 0, 1.0).unwrap(), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn laguerre_rejects_negative_argument() {
        assert!(assoc_laguerre(2, 1, -0.1).is_err());
        assert!(assoc_laguerre(2, 1, f64::NAN).is_err());
    }

    #[test]
    fn recurrence_matches_explicit() {
        for n in 0..=4 {
            for k in 0..6 {
                for i in 0..=100 {
                    let x = 0.1 * i as f64;
                    let got = assoc_laguerre(n, k, x).unwrap();
                    assert_abs_diff_eq!(got, explicit(n, k as f64, x), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn finite_over_declared_range() {
        for n in [0, 10, 25, 64] {
            for k in [0, 25, 64] {
                for x in [0.0, 1.0, 12.5, 50.0, 100.0] {
                    assert!(assoc_laguerre(n, k, x).unwrap().is_finite());
                }
            }
        }
    }

    #[test]
    fn table_agrees_with_scalar() {
        let t = laguerre_table(6, 0.7);
        assert_abs_diff_eq!(t[3][4], assoc_laguerre(4, 3, 0.7).unwrap(), epsilon = 1e-14);
        let lf = ln_factorials(6);
        assert_abs_diff_eq!(lf[5], 120f64.ln(), epsilon = 1e-13);
    }

    #[test]
    fn u_eta_reference_values() {
        assert_abs_diff_eq!(solve_u_eta(2.5).unwrap(), 2.125_345_191_387_469, epsilon = 1e-9);
        assert_abs_diff_eq!(solve_u_eta(6.4).unwrap(), 2.705_186_304_490_816, epsilon = 1e-9);
        let large = 6.4 * PI / 7.4;
        assert!((large - solve_u_eta(6.4).unwrap()).abs() / solve_u_eta(6.4).unwrap() < 0.005);
    }

    #[test]
    fn u_eta_residual_and_monotone() {
        for eta in [1.1, 2.5, 6.4, 50.0] {
            let u = solve_u_eta(eta).unwrap();
            assert!((u - eta * u.sin()).abs() < 1e-10);
            assert!(u > 0.0 && u < PI);
        }
        let mut prev = 0.0;
        for i in 1..200 {
            let u = solve_u_eta(1.0 + 0.05 * i as f64).unwrap();
            assert!(u > prev);
            prev = u;
        }
    }

    #[test]
    fn u_eta_requires_eta_above_one() {
        assert_eq!(solve_u_eta(1.0), Err(Error::NoInteriorRoot(1.0)));
        assert!(solve_u_eta(0.3).is_err());
    }
}
