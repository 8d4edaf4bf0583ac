// SPDX-License-Identifier: Apache-2.0

//! Sweep scenarios and their expansion into per-point configurations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::DimensionlessConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formalism {
    Quantum,
    Classical,
}

impl Formalism {
    pub fn as_str(&self) -> &'static str {
        match self {
            Formalism::Quantum => "quantum",
            Formalism::Classical => "classical",
        }
    }
}

impl fmt::Display for Formalism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formalism {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "quantum" => Ok(Formalism::Quantum),
            "classical" => Ok(Formalism::Classical),
            other => Err(Error::Config(format!("unknown formalism '{other}'"))),
        }
    }
}

/// Parse `quantum`, `classical`, `both` or a comma list of the first two.
pub fn parse_formalisms(s: &str) -> Result<Vec<Formalism>> {
    if s.trim() == "both" {
        return Ok(vec![Formalism::Quantum, Formalism::Classical]);
    }
    let mut out: Vec<Formalism> = s.split(',').map(str::parse).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SweepKind {
    /// Vary `lambda_bar` at fixed `eta`.
    LambdaSweep,
    /// Vary `eta` holding `u0 = 2 eta lambda_bar^2`.
    EtaSweepFixedU0 { u0: f64 },
    /// Vary `eta` holding `u0 lambda_bar = 2 eta lambda_bar^3`.
    EtaSweepFixedOmega { u0_lambda: f64 },
    /// Vary `theta`.
    TemperatureSweep,
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::LambdaSweep => "lambda-sweep",
            SweepKind::EtaSweepFixedU0 { .. } => "eta-sweep-fixed-u0",
            SweepKind::EtaSweepFixedOmega { .. } => "eta-sweep-fixed-omega",
            SweepKind::TemperatureSweep => "temperature-sweep",
        }
    }

    /// Config field that the grid values are written to.
    pub fn swept_param(&self) -> &'static str {
        match self {
            SweepKind::LambdaSweep => "lambda_bar",
            SweepKind::EtaSweepFixedU0 { .. } | SweepKind::EtaSweepFixedOmega { .. } => "eta",
            SweepKind::TemperatureSweep => "theta",
        }
    }

    /// Build a kind from its name; the held constants default to the base point's values.
    pub fn from_name(
        name: &str,
        base: &DimensionlessConfig,
        u0: Option<f64>,
        u0_lambda: Option<f64>,
    ) -> Result<Self> {
        match name.trim() {
            "lambda-sweep" => Ok(SweepKind::LambdaSweep),
            "eta-sweep-fixed-u0" => Ok(SweepKind::EtaSweepFixedU0 { u0: u0.unwrap_or_else(|| base.u0()) }),
            "eta-sweep-fixed-omega" => Ok(SweepKind::EtaSweepFixedOmega {
                u0_lambda: u0_lambda.unwrap_or_else(|| base.u0() * base.lambda_bar),
            }),
            "temperature-sweep" => Ok(SweepKind::TemperatureSweep),
            other => Err(Error::Config(format!("unknown sweep kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub grid: Vec<f64>,
    pub base: DimensionlessConfig,
    pub formalisms: Vec<Formalism>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::Config("sweep grid contains a non-finite value".into()));
        }
        if self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("sweep grid must be strictly increasing".into()));
        }
        if self.formalisms.is_empty() {
            return Err(Error::Config("no formalism selected".into()));
        }
        let held = match self.kind {
            SweepKind::EtaSweepFixedU0 { u0 } => Some(("sweep_u0", u0)),
            SweepKind::EtaSweepFixedOmega { u0_lambda } => Some(("sweep_u0_lambda", u0_lambda)),
            _ => None,
        };
        if let Some((name, v)) = held {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// One configuration per grid value, coupled parameters recomputed.
/// Points that violate the config invariants come back as errors in place.
pub fn expand_sweep(s: &SweepSpec) -> Result<Vec<Result<DimensionlessConfig>>> {
    s.validate()?;
    Ok(s.grid
        .iter()
        .map(|&g| {
            let mut cfg = s.base.clone();
            match s.kind {
                SweepKind::LambdaSweep => cfg.lambda_bar = g,
                SweepKind::TemperatureSweep => cfg.theta = g,
                SweepKind::EtaSweepFixedU0 { u0 } => {
                    cfg.eta = g;
                    cfg.lambda_bar = (u0 / (2.0 * g)).sqrt();
                }
                SweepKind::EtaSweepFixedOmega { u0_lambda } => {
                    cfg.eta = g;
                    cfg.lambda_bar = (u0_lambda / (2.0 * g)).cbrt();
                }
            }
            cfg.validate().map(|_| cfg)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn spec(kind: SweepKind, grid: Vec<f64>) -> SweepSpec {
        SweepSpec { kind, grid, base: DimensionlessConfig::default(), formalisms: vec![Formalism::Quantum] }
    }

    #[test]
    fn fixed_u0_recomputes_lambda() {
        let pts = expand_sweep(&spec(SweepKind::EtaSweepFixedU0 { u0: 5.0 }, vec![0.5, 2.5])).unwrap();
        let p = pts[1].as_ref().unwrap();
        assert_relative_eq!(p.lambda_bar, 1.0, max_relative = 1e-15);
        assert_relative_eq!(pts[0].as_ref().unwrap().u0(), 5.0, max_relative = 1e-12);
    }

    #[test]
    fn fixed_omega_holds_u0_lambda() {
        let pts = expand_sweep(&spec(SweepKind::EtaSweepFixedOmega { u0_lambda: 5.0 }, vec![0.1, 1.0, 10.0])).unwrap();
        for p in pts {
            let p = p.unwrap();
            assert_relative_eq!(p.u0() * p.lambda_bar, 5.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn single_parameter_sweeps() {
        let base = DimensionlessConfig::default();
        for p in expand_sweep(&spec(SweepKind::LambdaSweep, vec![0.2, 1.0, 5.0])).unwrap() {
            assert_eq!(p.unwrap().eta, base.eta);
        }
        let pts = expand_sweep(&spec(SweepKind::TemperatureSweep, vec![0.1, 1.0, 10.0])).unwrap();
        for (p, want) in pts.into_iter().zip([0.1, 1.0, 10.0]) {
            let p = p.unwrap();
            assert_eq!(p.theta, want);
            assert_eq!(DimensionlessConfig { theta: base.theta, ..p }, base);
        }
    }

    #[test]
    fn invalid_points_are_reported_in_place() {
        let pts = expand_sweep(&spec(SweepKind::TemperatureSweep, vec![-1.0, 0.5])).unwrap();
        assert!(pts[0].is_err());
        assert!(pts[1].is_ok());
    }

    #[test]
    fn spec_validation() {
        assert!(expand_sweep(&spec(SweepKind::LambdaSweep, vec![])).is_err());
        assert!(expand_sweep(&spec(SweepKind::LambdaSweep, vec![1.0, 1.0])).is_err());
        assert!(expand_sweep(&spec(SweepKind::EtaSweepFixedU0 { u0: 0.0 }, vec![1.0])).is_err());
        let mut s = spec(SweepKind::LambdaSweep, vec![1.0]);
        s.formalisms.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn formalism_parsing() {
        assert_eq!(parse_formalisms("both").unwrap(), vec![Formalism::Quantum, Formalism::Classical]);
        assert_eq!(parse_formalisms("classical, quantum,classical").unwrap().len(), 2);
        assert!(parse_formalisms("semiclassical").is_err());
        let base = DimensionlessConfig::default();
        let k = SweepKind::from_name("eta-sweep-fixed-u0", &base, None, None).unwrap();
        assert_eq!(k, SweepKind::EtaSweepFixedU0 { u0: base.u0() });
        assert!(SweepKind::from_name("pressure-sweep", &base, None, None).is_err());
    }

    proptest! {
        #[test]
        fn coupled_constraints_hold(u0 in 0.1f64..50.0, etas in proptest::collection::btree_set(1u32..2000, 1..12)) {
            let grid: Vec<f64> = etas.into_iter().map(|e| e as f64 * 0.01).collect();
            for p in expand_sweep(&spec(SweepKind::EtaSweepFixedU0 { u0 }, grid.clone())).unwrap() {
                let p = p.unwrap();
                prop_assert!(((p.u0() - u0) / u0).abs() < 1e-12);
            }
            for p in expand_sweep(&spec(SweepKind::EtaSweepFixedOmega { u0_lambda: u0 }, grid)).unwrap() {
                let p = p.unwrap();
                prop_assert!(((p.u0() * p.lambda_bar - u0) / u0).abs() < 1e-12);
            }
        }
    }
}
