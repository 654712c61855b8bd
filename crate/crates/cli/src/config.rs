//! Run configuration: flat `key = value` text with dotted section names.
//!
//! ```text
//! # a point 1 lambda0 above a 5 lambda0 slab
//! atom.lambda0 = 1e-6
//! atom.gamma0 = 1e7
//! eps.re = 2
//! eps.im = 0.1
//! geometry.d = 5e-6          # or: halfspace
//! geometry.z_a = 1e-6
//! baths.t_env = 300
//! baths.t_slab = 600
//! ```
//!
//! A JSON object (such as `point` output) is accepted too; keys that are not
//! configuration keys are ignored there, so results can be fed back in.

use std::collections::BTreeMap;

use slabtherm::{
    AtomSpec, Frequency, Permittivity, QuadratureSpec, SlabGeometry, ThermalPair, Thickness,
};

use crate::CliError;

/// Keys that may appear in a config file.
pub const KEYS: &[&str] = &[
    "atom.omega0",
    "atom.lambda0",
    "atom.dipole_sq",
    "atom.gamma0",
    "eps.re",
    "eps.im",
    "geometry.d",
    "geometry.z_a",
    "baths.t_env",
    "baths.t_slab",
    "quadrature.rel_tol",
    "quadrature.abs_tol",
    "quadrature.max_subdivisions",
    "sweep.axis",
    "sweep.min",
    "sweep.max",
    "sweep.count",
    "sweep.scale",
    "sweep.values",
    "sweep2.axis",
    "sweep2.min",
    "sweep2.max",
    "sweep2.count",
    "sweep2.scale",
    "sweep2.values",
    "evolve.t_max",
    "evolve.lifetimes",
    "evolve.samples",
    "evolve.rho22",
    "evolve.rho12_re",
    "evolve.rho12_im",
    "probe.k2",
];

/// Parameters a sweep axis may drive. `geometry.lhs_exact` sets the
/// thickness through the exact criterion, `d = lhs * d_min`.
pub const SWEEP_AXES: &[&str] = &[
    "atom.omega0",
    "atom.lambda0",
    "atom.dipole_sq",
    "atom.gamma0",
    "eps.re",
    "eps.im",
    "geometry.d",
    "geometry.lhs_exact",
    "geometry.z_a",
    "baths.t_env",
    "baths.t_slab",
    "probe.k2",
];

/// Raw key/value layer; later layers override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            Self::parse_json(text)
        } else {
            Self::parse_text(text)
        }
    }

    fn parse_text(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        Ok(Self { entries })
    }

    fn parse_json(text: &str) -> Result<Self, CliError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
        let object = value
            .as_object()
            .ok_or_else(|| CliError::Config("JSON config must be an object".into()))?;
        let mut entries = BTreeMap::new();
        for (key, v) in object {
            if !KEYS.contains(&key.as_str()) {
                continue;
            }
            let text = match v {
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Null => continue,
                other => return Err(CliError::Config(format!("`{key}`: unsupported value {other}"))),
            };
            entries.insert(key.clone(), text);
        }
        Ok(Self { entries })
    }

    pub fn merge(&mut self, other: RawConfig) {
        for (key, value) in other.entries {
            self.set(&key, value);
        }
    }

    /// Sets a key, dropping its mutually exclusive partner.
    pub fn set(&mut self, key: &str, value: String) {
        let partner = match key {
            "atom.omega0" => Some("atom.lambda0"),
            "atom.lambda0" => Some("atom.omega0"),
            "atom.dipole_sq" => Some("atom.gamma0"),
            "atom.gamma0" => Some("atom.dipole_sq"),
            _ => None,
        };
        if let Some(p) = partner {
            self.entries.remove(p);
        }
        self.entries.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("`{key}`: `{v}` is not a number")))
            })
            .transpose()
    }

    fn required(&self, key: &str) -> Result<f64, CliError> {
        self.number(key)?
            .ok_or_else(|| CliError::Config(format!("missing `{key}`")))
    }

    fn count(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| CliError::Config(format!("`{key}`: `{v}` is not a count")))
            })
            .transpose()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

impl SweepAxis {
    fn from_raw(raw: &RawConfig, section: &str) -> Result<Option<Self>, CliError> {
        let key = |k: &str| format!("{section}.{k}");
        let Some(name) = raw.get(&key("axis")) else {
            return Ok(None);
        };
        if !SWEEP_AXES.contains(&name) {
            return Err(CliError::Config(format!("`{}`: `{name}` is not a sweepable parameter", key("axis"))));
        }
        let values = if let Some(list) = raw.get(&key("values")) {
            list.split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        CliError::Config(format!("`{}`: `{v}` is not a number", key("values")))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            let min = raw.required(&key("min"))?;
            let max = raw.number(&key("max"))?.unwrap_or(min);
            let count = raw.count(&key("count"))?.unwrap_or(1);
            let scale = match raw.get(&key("scale")).unwrap_or("linear") {
                "linear" => Scale::Linear,
                "log" => Scale::Log,
                other => return Err(CliError::Config(format!("`{}`: unknown scale `{other}`", key("scale")))),
            };
            grid(min, max, count, scale).map_err(|m| CliError::Config(format!("{section}: {m}")))?
        };
        if values.is_empty() {
            return Err(CliError::Config(format!("{section}: no values")));
        }
        Ok(Some(Self {
            name: name.to_string(),
            values,
        }))
    }
}

/// `count` points from `min` to `max`, endpoints exact.
pub fn grid(min: f64, max: f64, count: usize, scale: Scale) -> Result<Vec<f64>, String> {
    if count == 0 {
        return Err("count must be at least 1".into());
    }
    if !(min.is_finite() && max.is_finite()) {
        return Err("bounds must be finite".into());
    }
    if scale == Scale::Log && !(min > 0.0 && max > 0.0) {
        return Err("log scale needs positive bounds".into());
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let last = (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                return min;
            }
            if i == count - 1 {
                return max;
            }
            let f = i as f64 / last;
            match scale {
                Scale::Linear => min + (max - min) * f,
                Scale::Log => (min.ln() + (max.ln() - min.ln()) * f).exp(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomFrequency {
    Omega0(f64),
    Lambda0(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomStrength {
    DipoleSq(f64),
    Gamma0(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveSpec {
    pub t_max: Option<f64>,
    /// `t_max` in units of `1 / (gamma_down + gamma_up)`.
    pub lifetimes: Option<f64>,
    pub samples: usize,
    pub rho22: f64,
    pub rho12_re: f64,
    pub rho12_im: f64,
}

/// A validated parameter point plus run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub frequency: AtomFrequency,
    pub strength: AtomStrength,
    pub eps: Permittivity,
    pub thickness: Thickness,
    pub z_a: f64,
    pub baths: ThermalPair,
    pub quadrature: QuadratureSpec,
    pub sweeps: Vec<SweepAxis>,
    pub evolve: EvolveSpec,
    pub probe_k2: Option<f64>,
}

fn invalid(e: slabtherm::Error) -> CliError {
    CliError::Config(e.to_string())
}

impl RunConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, CliError> {
        let frequency = match (raw.number("atom.omega0")?, raw.number("atom.lambda0")?) {
            (Some(w), None) => AtomFrequency::Omega0(w),
            (None, Some(l)) => AtomFrequency::Lambda0(l),
            _ => return Err(CliError::Config("give exactly one of `atom.omega0`, `atom.lambda0`".into())),
        };
        let strength = match (raw.number("atom.dipole_sq")?, raw.number("atom.gamma0")?) {
            (Some(d), None) => AtomStrength::DipoleSq(d),
            (None, Some(g)) => AtomStrength::Gamma0(g),
            _ => return Err(CliError::Config("give exactly one of `atom.dipole_sq`, `atom.gamma0`".into())),
        };
        let eps = Permittivity::new(raw.required("eps.re")?, raw.number("eps.im")?.unwrap_or(0.0))
            .map_err(invalid)?;
        let thickness = match raw.get("geometry.d") {
            Some("halfspace") => Thickness::HalfSpace,
            Some(_) => Thickness::finite(raw.required("geometry.d")?).map_err(invalid)?,
            None => return Err(CliError::Config("missing `geometry.d`".into())),
        };
        let z_a = raw.required("geometry.z_a")?;
        let baths = ThermalPair::new(raw.required("baths.t_env")?, raw.required("baths.t_slab")?)
            .map_err(invalid)?;
        let defaults = QuadratureSpec::default();
        let quadrature = QuadratureSpec::new(
            raw.number("quadrature.rel_tol")?.unwrap_or(defaults.rel_tol),
            raw.number("quadrature.abs_tol")?.unwrap_or(defaults.abs_tol),
            raw.count("quadrature.max_subdivisions")?
                .unwrap_or(defaults.max_subdivisions),
        )
        .map_err(invalid)?;
        let sweeps = ["sweep", "sweep2"]
            .iter()
            .filter_map(|s| SweepAxis::from_raw(raw, s).transpose())
            .collect::<Result<Vec<_>, _>>()?;
        if raw.get("sweep2.axis").is_some() && raw.get("sweep.axis").is_none() {
            return Err(CliError::Config("`sweep2` needs `sweep`".into()));
        }
        let evolve = EvolveSpec {
            t_max: raw.number("evolve.t_max")?,
            lifetimes: raw.number("evolve.lifetimes")?,
            samples: raw.count("evolve.samples")?.unwrap_or(101),
            rho22: raw.number("evolve.rho22")?.unwrap_or(1.0),
            rho12_re: raw.number("evolve.rho12_re")?.unwrap_or(0.0),
            rho12_im: raw.number("evolve.rho12_im")?.unwrap_or(0.0),
        };
        let config = Self {
            frequency,
            strength,
            eps,
            thickness,
            z_a,
            baths,
            quadrature,
            sweeps,
            evolve,
            probe_k2: raw.number("probe.k2")?,
        };
        config.atom()?;
        config.geometry()?;
        Ok(config)
    }

    pub fn omega0(&self) -> Result<Frequency, CliError> {
        match self.frequency {
            AtomFrequency::Omega0(w) => Frequency::new(w),
            AtomFrequency::Lambda0(l) => Frequency::from_reduced_wavelength(l),
        }
        .map_err(invalid)
    }

    pub fn atom(&self) -> Result<AtomSpec, CliError> {
        let omega = self.omega0()?;
        match self.strength {
            AtomStrength::DipoleSq(d) => AtomSpec::new(omega, d),
            AtomStrength::Gamma0(g) => AtomSpec::from_gamma0(omega, g),
        }
        .map_err(invalid)
    }

    pub fn geometry(&self) -> Result<SlabGeometry, CliError> {
        SlabGeometry::new(self.thickness, self.z_a).map_err(invalid)
    }
}

/// Config for one point of a sweep: the base layer with the axis values set.
pub fn with_axes(base: &RawConfig, assignments: &[(&str, f64)]) -> Result<RunConfig, CliError> {
    let mut raw = base.clone();
    for &(name, value) in assignments {
        if name == "geometry.lhs_exact" {
            // thickness from the criterion needs eps and lambda0 first
            continue;
        }
        raw.set(name, value.to_string());
    }
    if let Some(&(_, lhs)) = assignments.iter().find(|(n, _)| *n == "geometry.lhs_exact") {
        raw.set("geometry.d", "0".into());
        let provisional = RunConfig::from_raw(&raw)?;
        let lambda0 = provisional.omega0()?.reduced_wavelength();
        let crit = slabtherm::thickness_criterion(provisional.eps, 0.0, lambda0).map_err(invalid)?;
        raw.set("geometry.d", (lhs * crit.d_min_exact).to_string());
    }
    RunConfig::from_raw(&raw)
}
