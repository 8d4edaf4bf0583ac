// SPDX-License-Identifier: Apache-2.0

//! Flat `key = value` configuration files.
//!
//! Keys are the field names of [`DimensionlessConfig`], optionally replaced
//! by a physical (SI) description, plus the sweep keys:
//!
//! ```text
//! # stick-slip point, lambda sweep
//! eta = 2.5
//! theta = 0.1
//! sweep_kind = lambda-sweep
//! sweep_grid = 0.2, 0.5, 1, 2, 5
//! formalisms = quantum, classical
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::{
    nondimensionalize, Corrugation, DimensionlessConfig, PhysicalParams, SeparationModel, StochasticScheme,
};
use crate::scenario::{parse_formalisms, Formalism, SweepKind, SweepSpec};

const DIMENSIONLESS_KEYS: [&str; 5] = ["eta", "lambda_bar", "omega_t", "theta", "omega_c_ratio"];
const PHYSICAL_KEYS: [&str; 6] =
    ["mass", "lattice_constant", "trap_frequency", "drive_velocity", "temperature", "cutoff_frequency"];
const SEPARATION_KEYS: [&str; 5] = ["c_sr", "d0", "c_lr", "sigma_lr", "separation"];
const NUMERIC_KEYS: [&str; 12] = [
    "alpha",
    "n_max",
    "n_steps",
    "n_steps_classical",
    "n_ran",
    "n_periods",
    "seed",
    "record_stride",
    "stochastic_scheme",
    "lamb_shift",
    "positivity_floor",
    "corrugation_amplitude",
];
const SWEEP_KEYS: [&str; 5] = ["sweep_kind", "sweep_grid", "formalisms", "sweep_u0", "sweep_u0_lambda"];

/// Parsed contents of a configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    /// The base point (for a sweep, the values not overwritten by the grid).
    pub point: DimensionlessConfig,
    /// Present when the file was written in SI units.
    pub physical: Option<PhysicalParams>,
    /// Present when `sweep_kind` is set.
    pub sweep: Option<SweepSpec>,
    /// Formalisms requested by the file, if any.
    pub formalisms: Option<Vec<Formalism>>,
}

struct Entries {
    map: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&(String, usize)> {
        self.map.get(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Config(format!("line {line}: cannot parse {key} = '{v}'"))),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| Error::Config(format!("missing key '{key}'")))
    }
}

fn tokenize(text: &str) -> Result<Entries> {
    let known: Vec<&str> = DIMENSIONLESS_KEYS
        .iter()
        .chain(&PHYSICAL_KEYS)
        .chain(&SEPARATION_KEYS)
        .chain(&NUMERIC_KEYS)
        .chain(&SWEEP_KEYS)
        .copied()
        .collect();
    let mut map = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line_no}: expected 'key = value'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !known.contains(&key) {
            return Err(Error::Config(format!("line {line_no}: unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(Error::Config(format!("line {line_no}: empty value for '{key}'")));
        }
        if map.insert(key.to_string(), (value.to_string(), line_no)).is_some() {
            return Err(Error::Config(format!("line {line_no}: duplicate key '{key}'")));
        }
    }
    Ok(Entries { map })
}

fn parse_scheme(e: &Entries) -> Result<Option<StochasticScheme>> {
    match e.raw("stochastic_scheme") {
        None => Ok(None),
        Some((v, line)) => match v.to_ascii_lowercase().as_str() {
            "ito" => Ok(Some(StochasticScheme::Ito)),
            "stratonovich" | "heun" => Ok(Some(StochasticScheme::Stratonovich)),
            _ => Err(Error::Config(format!("line {line}: unknown stochastic_scheme '{v}'"))),
        },
    }
}

fn parse_grid(e: &Entries) -> Result<Vec<f64>> {
    let (v, line) = e.raw("sweep_grid").ok_or_else(|| Error::Config("sweep_kind set but sweep_grid missing".into()))?;
    v.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("line {line}: bad grid value '{}'", s.trim())))
        })
        .collect()
}

fn parse_physical(e: &Entries) -> Result<Option<PhysicalParams>> {
    let any_physical = PHYSICAL_KEYS
        .iter()
        .chain(&SEPARATION_KEYS)
        .chain(["corrugation_amplitude"].iter())
        .any(|k| e.has(k));
    if !any_physical {
        return Ok(None);
    }
    if let Some(k) = DIMENSIONLESS_KEYS.iter().find(|k| e.has(k)) {
        return Err(Error::Config(format!(
            "'{k}' conflicts with the physical (SI) keys; give one description only"
        )));
    }
    let has_amp = e.has("corrugation_amplitude");
    let has_sep = SEPARATION_KEYS.iter().any(|k| e.has(k));
    let corrugation = match (has_amp, has_sep) {
        (true, true) => {
            return Err(Error::Config("corrugation_amplitude conflicts with the separation-model keys".into()))
        }
        (true, false) => Corrugation::Amplitude(e.require("corrugation_amplitude")?),
        (false, true) => Corrugation::Separation(SeparationModel {
            c_sr: e.require("c_sr")?,
            d0: e.require("d0")?,
            c_lr: e.require("c_lr")?,
            sigma_lr: e.require("sigma_lr")?,
            separation: e.require("separation")?,
        }),
        (false, false) => return Err(Error::Config("physical description lacks a corrugation".into())),
    };
    Ok(Some(PhysicalParams {
        mass: e.require("mass")?,
        lattice_constant: e.require("lattice_constant")?,
        trap_frequency: e.require("trap_frequency")?,
        drive_velocity: e.require("drive_velocity")?,
        corrugation,
        alpha: e.get("alpha")?.unwrap_or(DimensionlessConfig::default().alpha),
        temperature: e.require("temperature")?,
        cutoff_frequency: e.require("cutoff_frequency")?,
    }))
}

/// Parse configuration text. The resulting point is validated.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let e = tokenize(text)?;
    let physical = parse_physical(&e)?;
    let mut cfg = match &physical {
        Some(p) => nondimensionalize(p)?,
        None => DimensionlessConfig::default(),
    };

    macro_rules! set {
        ($($field:ident),*) => {
            $( if let Some(v) = e.get(stringify!($field))? { cfg.$field = v; } )*
        };
    }
    set!(eta, lambda_bar, omega_t, theta, omega_c_ratio, alpha);
    set!(n_max, n_steps, n_steps_classical, n_ran, n_periods, seed, record_stride, lamb_shift, positivity_floor);
    if let Some(s) = parse_scheme(&e)? {
        cfg.stochastic_scheme = s;
    }
    cfg.validate()?;

    let formalisms = match e.raw("formalisms") {
        Some((v, _)) => Some(parse_formalisms(v)?),
        None => None,
    };

    let sweep = match e.raw("sweep_kind") {
        None => {
            if let Some(k) = ["sweep_grid", "sweep_u0", "sweep_u0_lambda"].iter().find(|k| e.has(k)) {
                return Err(Error::Config(format!("'{k}' given without sweep_kind")));
            }
            None
        }
        Some((name, _)) => {
            let u0: Option<f64> = e.get("sweep_u0")?;
            let u0_lambda: Option<f64> = e.get("sweep_u0_lambda")?;
            let kind = SweepKind::from_name(name, &cfg, u0, u0_lambda)?;
            let misplaced = match kind {
                SweepKind::EtaSweepFixedU0 { .. } => u0_lambda.map(|_| "sweep_u0_lambda"),
                SweepKind::EtaSweepFixedOmega { .. } => u0.map(|_| "sweep_u0"),
                _ => u0.map(|_| "sweep_u0").or(u0_lambda.map(|_| "sweep_u0_lambda")),
            };
            if let Some(k) = misplaced {
                return Err(Error::Config(format!("'{k}' does not apply to {}", kind.name())));
            }
            let spec = SweepSpec {
                kind,
                grid: parse_grid(&e)?,
                base: cfg.clone(),
                formalisms: formalisms.clone().unwrap_or_else(|| vec![Formalism::Quantum, Formalism::Classical]),
            };
            spec.validate()?;
            Some(spec)
        }
    };

    Ok(ConfigFile { point: cfg, physical, sweep, formalisms })
}

/// Read and parse a configuration file.
pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| Error::Io(format!("{}: {err}", path.display())))?;
    parse_config(&text)
}
