// SPDX-License-Identifier: Apache-2.0

//! Instantaneous eigendecomposition with eigenvector tracking along a
//! trajectory.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::operators::{asymmetry, OperatorMatrix};

const SYMMETRY_TOL: f64 = 1e-12;
const TIE_TOL: f64 = 1e-6;

/// Eigenpairs of a real symmetric Hamiltonian at one instant.
///
/// The Hamiltonians diagonalized here are real symmetric, so the
/// eigenvectors are real and the gauge freedom is a sign per column.
#[derive(Debug, Clone, PartialEq)]
pub struct InstantSpectrum {
    pub energies: Vec<f64>,
    /// Columns are eigenvectors in the moving basis.
    pub states: DMatrix<f64>,
    pub t_over_t: f64,
    /// Time of the spectrum this one was gauge-matched against.
    pub gauge_ref: Option<f64>,
    /// Number of near-tied assignments resolved by energy order.
    pub ambiguous: usize,
}

impl InstantSpectrum {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Largest element of `|U^T U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let g = self.states.transpose() * &self.states;
        (g - DMatrix::identity(self.len(), self.len())).amax()
    }

    /// `U diag(E) U^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut scaled = self.states.clone();
        for (j, e) in self.energies.iter().enumerate() {
            scaled.column_mut(j).scale_mut(*e);
        }
        scaled * self.states.transpose()
    }
}

/// Full eigendecomposition with ascending energies.
pub fn diagonalize(h: &OperatorMatrix) -> Result<InstantSpectrum> {
    let err = asymmetry(&h.data);
    if err > SYMMETRY_TOL {
        return Err(Error::Contract(format!("diagonalize: input not Hermitian (asymmetry {err:.3e})")));
    }
    Ok(diagonalize_symmetric(h.data.clone(), h.t_over_t))
}

pub(crate) fn diagonalize_symmetric(h: DMatrix<f64>, t_over_t: f64) -> InstantSpectrum {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let states = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    InstantSpectrum { energies, states, t_over_t, gauge_ref: None, ambiguous: 0 }
}

/// Reorder and re-sign `next` so its columns continue those of `prev`.
pub fn track_gauge(prev: &InstantSpectrum, next: InstantSpectrum) -> Result<InstantSpectrum> {
    let n = prev.len();
    if next.len() != n {
        return Err(Error::Contract(format!(
            "track_gauge: basis size {} vs {}",
            n,
            next.len()
        )));
    }
    let overlap = prev.states.transpose() * &next.states;

    let identity_ok = (0..n).all(|i| overlap[(i, i)].abs() > FRAC_1_SQRT_2);
    let (perm, ambiguous) = if identity_ok { ((0..n).collect(), 0) } else { assign(&overlap) };

    let mut states = DMatrix::zeros(n, n);
    let mut energies = Vec::with_capacity(n);
    for (i, &j) in perm.iter().enumerate() {
        let sign = if overlap[(i, j)] < 0.0 { -1.0 } else { 1.0 };
        states.set_column(i, &(next.states.column(j) * sign));
        energies.push(next.energies[j]);
    }
    Ok(InstantSpectrum {
        energies,
        states,
        t_over_t: next.t_over_t,
        gauge_ref: Some(prev.t_over_t),
        ambiguous,
    })
}

/// Greedy maximal-overlap assignment, ties broken by energy order.
fn assign(overlap: &DMatrix<f64>) -> (Vec<usize>, usize) {
    let n = overlap.nrows();
    let mut ambiguous = 0;
    for i in 0..n {
        let mut row: Vec<f64> = (0..n).map(|j| overlap[(i, j)].abs()).collect();
        row.sort_by(|a, b| b.total_cmp(a));
        if n > 1 && row[0] - row[1] < TIE_TOL {
            ambiguous += 1;
        }
    }

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            pairs.push((overlap[(i, j)].abs(), i, j));
        }
    }
    // Descending overlap; within a tie prefer the energy-ordered pairing.
    pairs.sort_by(|a, b| {
        let tied = (a.0 - b.0).abs() < TIE_TOL;
        if tied {
            a.1.abs_diff(a.2).cmp(&b.1.abs_diff(b.2)).then(a.2.cmp(&b.2))
        } else {
            b.0.total_cmp(&a.0)
        }
    });

    let mut perm = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, i, j) in pairs {
        if perm[i] == usize::MAX && !taken[j] {
            perm[i] = j;
            taken[j] = true;
        }
    }
    (perm, ambiguous)
}
