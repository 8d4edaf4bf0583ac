// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no root of u = eta*sin(u) inside (0, pi) for eta = {0}")]
    NoInteriorRoot(f64),

    #[error("no double well for eta = {0} (requires eta > 1)")]
    NoWell(f64),

    #[error("no classical slip for eta = {0} (requires eta >= 1)")]
    NoSlip(f64),

    #[error("degenerate level slopes in Landau-Zener formula")]
    DegenerateSlope,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("trace error {error:.3e} at t/T = {t_over_t:.6} exceeds limit (step size too large)")]
    TraceDrift { error: f64, t_over_t: f64 },

    #[error("positivity: min eigenvalue {min_eigenvalue:.3e} at t/T = {t_over_t:.6}")]
    Positivity { min_eigenvalue: f64, t_over_t: f64 },

    #[error("non-finite classical state at t/T = {0:.6}")]
    NonFinite(f64),

    #[error("ensemble aborted: {aborted} of {total} runs failed")]
    EnsembleAborted { aborted: usize, total: usize },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
