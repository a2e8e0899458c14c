//! Flat TOML experiment configuration.
//!
//! ```toml
//! N = 60            # sites per chain
//! K = 0.5           # hopping
//! h = 0.0           # transverse field (inert)
//! gamma = 0.5       # rescaled coupling Γ
//! tau = 0.01        # collision time, discrete integrator only
//! mu = 1.0          # initial magnetization
//! integrator = "exact"          # exact | rk4 | discrete
//! dt = 0.01                     # rk4 step
//! t_end = 60.0
//! sample_times = [0.0, 30.0, 60.0]
//! observables = ["magnetization", "current", "cross_concurrence"]
//! sweep_axis = "gamma"          # gamma | mu
//! sweep_grid = [0.25, 0.5, 1.0]
//! output_dir = "out"
//! mode = "simulate"             # optional, must agree with the subcommand
//! ```
//!
//! Unknown keys are rejected.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use toml::{Table, Value};

use crate::dynamics::max_step;
use crate::error::Error;
use crate::model::SystemSpec;

/// A configuration problem, always attributed to one key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { key, reason } => ConfigError::new(key, reason),
            other => ConfigError::new("config", other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simulate,
    Steady,
    Sweep,
    Analyze,
    Validate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Steady => "steady",
            Mode::Sweep => "sweep",
            Mode::Analyze => "analyze",
            Mode::Validate => "validate",
        }
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "simulate" => Mode::Simulate,
            "steady" => Mode::Steady,
            "sweep" => Mode::Sweep,
            "analyze" => Mode::Analyze,
            "validate" => Mode::Validate,
            _ => return Err(format!("unknown mode `{s}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Exact,
    Rk4,
    Discrete,
}

impl FromStr for Integrator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "exact" => Integrator::Exact,
            "rk4" => Integrator::Rk4,
            "discrete" => Integrator::Discrete,
            _ => return Err(format!("unknown integrator `{s}` (exact, rk4, discrete)")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Magnetization,
    Current,
    CrossConcurrence,
    LongitudinalConcurrence,
}

impl Observable {
    pub const ALL: [Observable; 4] = [
        Observable::Magnetization,
        Observable::Current,
        Observable::CrossConcurrence,
        Observable::LongitudinalConcurrence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::Magnetization => "magnetization",
            Observable::Current => "current",
            Observable::CrossConcurrence => "cross_concurrence",
            Observable::LongitudinalConcurrence => "longitudinal_concurrence",
        }
    }
}

impl FromStr for Observable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Observable::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| format!("unknown observable `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Gamma,
    Mu,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
}

/// Parsed and validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub sites: usize,
    pub hopping: f64,
    pub field: f64,
    pub gamma: f64,
    pub tau: Option<f64>,
    pub mu: f64,
    pub integrator: Integrator,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub sample_times: Option<Vec<f64>>,
    pub observables: Vec<Observable>,
    pub sweep: Option<Sweep>,
    pub output_dir: Option<PathBuf>,
}

const KEYS: [&str; 15] = [
    "mode",
    "N",
    "K",
    "h",
    "gamma",
    "tau",
    "mu",
    "integrator",
    "dt",
    "t_end",
    "sample_times",
    "observables",
    "sweep_axis",
    "sweep_grid",
    "output_dir",
];

/// Default number of evenly spaced samples on `[0, t_end]`.
pub const DEFAULT_SAMPLES: usize = 11;

struct Reader {
    table: Table,
}

impl Reader {
    fn number(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(other) => Err(ConfigError::new(
                key,
                format!("expected a number, found {}", other.type_str()),
            )),
        }
    }

    fn required_number(&self, key: &str) -> Result<f64, ConfigError> {
        self.number(key)?
            .ok_or_else(|| ConfigError::new(key, "missing required key"))
    }

    fn string(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(ConfigError::new(
                key,
                format!("expected a string, found {}", other.type_str()),
            )),
        }
    }

    fn parsed<T: FromStr<Err = String>>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.string(key)?
            .map(|s| s.parse().map_err(|e| ConfigError::new(key, e)))
            .transpose()
    }

    fn numbers(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(v) = self.table.get(key) else {
            return Ok(None);
        };
        let Value::Array(items) = v else {
            return Err(ConfigError::new(key, "expected an array of numbers"));
        };
        items
            .iter()
            .map(|item| match item {
                Value::Float(f) => Ok(*f),
                Value::Integer(i) => Ok(*i as f64),
                _ => Err(ConfigError::new(key, "expected an array of numbers")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn strings(&self, key: &str) -> Result<Option<Vec<String>>, ConfigError> {
        let Some(v) = self.table.get(key) else {
            return Ok(None);
        };
        let Value::Array(items) = v else {
            return Err(ConfigError::new(key, "expected an array of strings"));
        };
        items
            .iter()
            .map(|item| match item {
                Value::String(s) => Ok(s.clone()),
                _ => Err(ConfigError::new(key, "expected an array of strings")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

impl ExperimentConfig {
    /// Parses TOML text. Only key-level checks happen here; mode-specific
    /// requirements are checked by [`ExperimentConfig::check_for`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::new("config", format!("not valid TOML: {e}")))?;
        if let Some(bad) = table.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(ConfigError::new(bad.as_str(), "unknown key"));
        }
        let r = Reader { table };

        let sites = match r.table.get("N") {
            None => return Err(ConfigError::new("N", "missing required key")),
            Some(Value::Integer(n)) if *n >= 1 => *n as usize,
            Some(Value::Integer(n)) => {
                return Err(ConfigError::new("N", format!("must be at least 1, got {n}")))
            }
            Some(other) => {
                return Err(ConfigError::new(
                    "N",
                    format!("expected an integer, found {}", other.type_str()),
                ))
            }
        };
        let observables = match r.strings("observables")? {
            None => Observable::ALL.to_vec(),
            Some(names) => {
                if names.is_empty() {
                    return Err(ConfigError::new("observables", "list is empty"));
                }
                names
                    .iter()
                    .map(|n| n.parse().map_err(|e| ConfigError::new("observables", e)))
                    .collect::<Result<Vec<_>, _>>()?
            }
        };
        let axis = match r.string("sweep_axis")? {
            None => None,
            Some("gamma") => Some(SweepAxis::Gamma),
            Some("mu") => Some(SweepAxis::Mu),
            Some(other) => {
                return Err(ConfigError::new(
                    "sweep_axis",
                    format!("unknown axis `{other}` (gamma, mu)"),
                ))
            }
        };
        let grid = r.numbers("sweep_grid")?;
        let sweep = match (axis, grid) {
            (None, None) => None,
            (Some(_), None) => return Err(ConfigError::new("sweep_grid", "missing for sweep_axis")),
            (None, Some(_)) => return Err(ConfigError::new("sweep_axis", "missing for sweep_grid")),
            (Some(axis), Some(grid)) => Some(Sweep { axis, grid }),
        };
        let config = Self {
            mode: r.parsed("mode")?,
            sites,
            hopping: r.number("K")?.unwrap_or(crate::model::DEFAULT_HOPPING),
            field: r.number("h")?.unwrap_or(0.0),
            gamma: r.required_number("gamma")?,
            tau: r.number("tau")?,
            mu: r.number("mu")?.unwrap_or(1.0),
            integrator: r.parsed("integrator")?.unwrap_or(Integrator::Exact),
            dt: r.number("dt")?,
            t_end: r.number("t_end")?,
            sample_times: r.numbers("sample_times")?,
            observables,
            sweep,
            output_dir: r.string("output_dir")?.map(PathBuf::from),
        };
        // builds and discards a spec so parameter ranges are checked early
        config.spec()?;
        Ok(config)
    }

    pub fn spec(&self) -> Result<SystemSpec, ConfigError> {
        self.spec_with(self.gamma, self.mu)
    }

    /// Spec with Γ and μ overridden, as used by sweeps.
    pub fn spec_with(&self, gamma: f64, mu: f64) -> Result<SystemSpec, ConfigError> {
        let mut spec = SystemSpec::uniform(self.sites, gamma, mu)?
            .hopping_amplitude(self.hopping)?
            .field_strength(self.field)?;
        if let Some(tau) = self.tau {
            spec = spec.interaction_time(tau)?;
        }
        Ok(spec)
    }

    /// Sample times for `simulate`, defaulting to an even grid on `[0, t_end]`.
    pub fn times(&self) -> Result<Vec<f64>, ConfigError> {
        let t_end = self
            .t_end
            .ok_or_else(|| ConfigError::new("t_end", "missing required key"))?;
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(ConfigError::new("t_end", "must be positive"));
        }
        let times = match &self.sample_times {
            Some(t) => t.clone(),
            None => (0..DEFAULT_SAMPLES)
                .map(|k| t_end * k as f64 / (DEFAULT_SAMPLES - 1) as f64)
                .collect(),
        };
        if times.is_empty() {
            return Err(ConfigError::new("sample_times", "list is empty"));
        }
        if !strictly_increasing(&times) {
            return Err(ConfigError::new("sample_times", "must be strictly increasing"));
        }
        if times[0] < 0.0 || times[times.len() - 1] > t_end {
            return Err(ConfigError::new("sample_times", "must lie in [0, t_end]"));
        }
        Ok(times)
    }

    /// Checks everything `mode` needs before any computation starts.
    pub fn check_for(&self, mode: Mode) -> Result<(), ConfigError> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(ConfigError::new(
                    "mode",
                    format!("config is for `{}` but `{}` was requested", m.name(), mode.name()),
                ));
            }
        }
        let spec = self.spec()?;
        match mode {
            Mode::Simulate => {
                self.times()?;
                match self.integrator {
                    Integrator::Exact => {
                        if self.gamma <= 0.0 {
                            return Err(ConfigError::new(
                                "gamma",
                                "the exact propagator needs gamma > 0; use integrator = \"rk4\"",
                            ));
                        }
                    }
                    Integrator::Rk4 => {
                        let limit = max_step(&spec);
                        if let Some(dt) = self.dt {
                            if !(dt > 0.0 && dt <= limit) {
                                return Err(ConfigError::new(
                                    "dt",
                                    format!("must lie in (0, {limit}] for this system"),
                                ));
                            }
                        }
                    }
                    Integrator::Discrete => {
                        let tau = self
                            .tau
                            .ok_or_else(|| ConfigError::new("tau", "required by the discrete integrator"))?;
                        for t in self.times()? {
                            let k = (t / tau).round();
                            if (k * tau - t).abs() > 1e-9 * t.max(1.0) {
                                return Err(ConfigError::new(
                                    "sample_times",
                                    format!("{t} is not a multiple of tau = {tau}"),
                                ));
                            }
                        }
                    }
                }
            }
            Mode::Steady | Mode::Analyze => {
                if self.gamma <= 0.0 {
                    return Err(ConfigError::new("gamma", "must be positive"));
                }
                if mode == Mode::Analyze && self.sites < 2 {
                    return Err(ConfigError::new("N", "analysis needs at least two sites per chain"));
                }
            }
            Mode::Sweep => {
                let sweep = self
                    .sweep
                    .as_ref()
                    .ok_or_else(|| ConfigError::new("sweep_axis", "missing required key"))?;
                if sweep.grid.is_empty() {
                    return Err(ConfigError::new("sweep_grid", "grid is empty"));
                }
                if !strictly_increasing(&sweep.grid) {
                    return Err(ConfigError::new("sweep_grid", "must be strictly increasing"));
                }
                if self.sites < 2 {
                    return Err(ConfigError::new("N", "sweeps need at least two sites per chain"));
                }
                for &v in &sweep.grid {
                    match sweep.axis {
                        SweepAxis::Gamma => {
                            if !(v.is_finite() && v > 0.0) {
                                return Err(ConfigError::new("sweep_grid", "gamma values must be positive"));
                            }
                        }
                        SweepAxis::Mu => {
                            if !(-1.0..=1.0).contains(&v) {
                                return Err(ConfigError::new("sweep_grid", "mu values must lie in [-1, 1]"));
                            }
                            if self.gamma <= 0.0 {
                                return Err(ConfigError::new("gamma", "must be positive"));
                            }
                        }
                    }
                }
            }
            Mode::Validate => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = ExperimentConfig::parse("N = 4\ngamma = 0.5\nt_end = 5").unwrap();
        assert_eq!(c.sites, 4);
        assert_eq!(c.hopping, 0.5);
        assert_eq!(c.integrator, Integrator::Exact);
        assert_eq!(c.times().unwrap().len(), DEFAULT_SAMPLES);
        c.check_for(Mode::Simulate).unwrap();
    }

    #[test]
    fn errors_name_the_key() {
        let key = |text: &str| ExperimentConfig::parse(text).unwrap_err().key;
        assert_eq!(key("N = 0\ngamma = 0.5"), "N");
        assert_eq!(key("N = 4"), "gamma");
        assert_eq!(key("N = 4\ngamma = 0.5\ngama = 1"), "gama");
        assert_eq!(key("N = 4\ngamma = -1"), "gamma");
        assert_eq!(key("N = 4\ngamma = 0.5\nmu = 2"), "mu");
        assert_eq!(key("N = 4\ngamma = 0.5\nintegrator = \"euler\""), "integrator");
        assert_eq!(key("N = \"four\"\ngamma = 0.5"), "N");
    }

    #[test]
    fn mode_specific_checks() {
        let c = ExperimentConfig::parse("N = 4\ngamma = 0.5\nsweep_axis = \"gamma\"\nsweep_grid = []").unwrap();
        assert_eq!(c.check_for(Mode::Sweep).unwrap_err().key, "sweep_grid");
        let c = ExperimentConfig::parse("N = 4\ngamma = 0.5\nt_end = 2\nsample_times = [1, 0.5]").unwrap();
        assert_eq!(c.check_for(Mode::Simulate).unwrap_err().key, "sample_times");
        let c = ExperimentConfig::parse("N = 4\ngamma = 0.5\nt_end = 2\nintegrator = \"discrete\"").unwrap();
        assert_eq!(c.check_for(Mode::Simulate).unwrap_err().key, "tau");
        let c = ExperimentConfig::parse("N = 4\ngamma = 0.5\nt_end = 2\nintegrator = \"rk4\"\ndt = 1").unwrap();
        assert_eq!(c.check_for(Mode::Simulate).unwrap_err().key, "dt");
        let c = ExperimentConfig::parse("mode = \"steady\"\nN = 4\ngamma = 0.5").unwrap();
        assert_eq!(c.check_for(Mode::Simulate).unwrap_err().key, "mode");
    }
}
