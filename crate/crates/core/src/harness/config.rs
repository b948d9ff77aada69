//! Flat TOML experiment configuration with per-experiment schemas.
//!
//! A config file holds `experiment`, `seed`, optionally `output`, and any of
//! the parameters listed in the experiment's defaults. Values must match the
//! type of the default (integers are accepted where floats are expected).
//! Anything else is rejected.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use toml::{Table, Value};

use super::output::format_f64;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    SparseRisk,
    RffSweep,
    KernelApprox,
    ImplicitBias,
    Polyfit,
    BiasVariance,
    Emc,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::SparseRisk,
        Experiment::RffSweep,
        Experiment::KernelApprox,
        Experiment::ImplicitBias,
        Experiment::Polyfit,
        Experiment::BiasVariance,
        Experiment::Emc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SparseRisk => "sparse-risk",
            Experiment::RffSweep => "rff-sweep",
            Experiment::KernelApprox => "kernel-approx",
            Experiment::ImplicitBias => "implicit-bias",
            Experiment::Polyfit => "polyfit",
            Experiment::BiasVariance => "bias-variance",
            Experiment::Emc => "emc",
        }
    }

    /// Default parameters; the key set doubles as the schema.
    pub fn defaults_toml(self) -> &'static str {
        match self {
            Experiment::SparseRisk => {
                "d = 100\nn = 40\nw_norm_sq = 1.0\nnoise_var = 0.04\np_step = 1\ntrials = 2000\ntest_points = 100\n"
            }
            Experiment::RffSweep => {
                "source = \"auto\"\nn_train = 1000\nn_test = 1000\n\
                 n_grid = [20, 50, 100, 250, 500, 1000, 2000, 4000, 8000]\nbandwidth = 5.0\nrepeats = 3\n\
                 synthetic_dim = 6\nsynthetic_centers = 200\nsynthetic_target_bandwidth = 0.5\n\
                 synthetic_bandwidth = 0.5\n"
            }
            Experiment::KernelApprox => {
                "dim = 5\npoints = 50\nbandwidth = 1.0\nn_grid = [100, 300, 1000, 3000, 10000]\nmaps = 20\n"
            }
            Experiment::ImplicitBias => {
                "n = 50\nd = 2\nmargin = 0.5\nloss = \"logistic\"\nstep_fraction = 0.9\niterations = 100000\n\
                 record_every = 100\ngap_threshold = 0.05\n"
            }
            Experiment::Polyfit => "n = 20\nnoise = 0.5\ndegree = 1000\ngrid_points = 512\n",
            Experiment::BiasVariance => {
                "degrees = [1, 2, 3, 4, 6, 8, 10, 12, 15, 20]\nn = 20\nsigma = 0.1\ntrials = 2000\n\
                 truth = [0.0, -0.3, 0.0, 0.5]\n"
            }
            Experiment::Emc => {
                "model = \"linear\"\nd = 30\nn_max = 60\nepsilon = 1e-6\ntrials = 10\nn_features = 30\nbandwidth = 1.0\n"
            }
        }
    }

    pub fn defaults(self) -> Table {
        self.defaults_toml().parse().expect("built-in defaults are valid TOML")
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Effective parameters: defaults overlaid with the file's values.
    pub params: Table,
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "string",
        Value::Integer(_) => "integer",
        Value::Float(_) => "float",
        Value::Boolean(_) => "boolean",
        Value::Datetime(_) => "datetime",
        Value::Array(_) => "array",
        Value::Table(_) => "table",
    }
}

/// Coerces `v` to the type of `default`, widening integers to floats.
fn conform(key: &str, v: Value, default: &Value) -> Result<Value> {
    match (default, v) {
        (Value::Float(_), Value::Integer(i)) => Ok(Value::Float(i as f64)),
        (Value::Array(d), Value::Array(items)) => {
            let proto = d.first().expect("array defaults are non-empty");
            items.into_iter().map(|it| conform(key, it, proto)).collect::<Result<Vec<_>>>().map(Value::Array)
        }
        (d, v) if type_name(d) == type_name(&v) => Ok(v),
        (d, v) => Err(Error::Config(format!("key '{key}' expects {}, got {}", type_name(d), type_name(&v)))),
    }
}

/// TOML text for a value, with floats in shortest round-trip form.
fn echo_value(v: &Value) -> String {
    match v {
        Value::Float(f) => format_f64(*f),
        Value::Array(items) => format!("[{}]", items.iter().map(echo_value).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn parse_seed(v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        Value::String(s) => {
            s.parse().map_err(|_| Error::Config(format!("seed '{s}' is not a 64-bit unsigned integer")))
        }
        other => Err(Error::Config(format!("seed must be a non-negative integer, got {other}"))),
    }
}

impl ExperimentConfig {
    /// Config with every parameter at its default.
    pub fn with_defaults(experiment: Experiment, seed: u64) -> Self {
        Self { experiment, seed, output: None, params: experiment.defaults() }
    }

    /// Parses config text. `experiment` may come from the text or from the
    /// caller; if both are present they must agree.
    pub fn parse(text: &str, experiment: Option<Experiment>) -> Result<Self> {
        let mut table: Table = text.parse().map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        let named = match table.remove("experiment") {
            Some(Value::String(s)) => Some(s.parse::<Experiment>()?),
            Some(other) => return Err(Error::Config(format!("experiment must be a string, got {other}"))),
            None => None,
        };
        let experiment = match (named, experiment) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config names experiment '{a}' but '{b}' was requested")))
            }
            (Some(e), _) | (None, Some(e)) => e,
            (None, None) => return Err(Error::Config("no experiment named".into())),
        };
        let seed = table.remove("seed").map(|v| parse_seed(&v)).transpose()?.unwrap_or(0);
        let output = match table.remove("output") {
            Some(Value::String(s)) => Some(PathBuf::from(s)),
            Some(other) => return Err(Error::Config(format!("output must be a string, got {other}"))),
            None => None,
        };
        let mut params = experiment.defaults();
        for (key, value) in table {
            let default = params
                .get(&key)
                .ok_or_else(|| Error::Config(format!("unknown key '{key}' for experiment '{experiment}'")))?;
            let value = conform(&key, value, default)?;
            params.insert(key, value);
        }
        Ok(Self { experiment, seed, output, params })
    }

    pub fn from_file(path: &Path, experiment: Option<Experiment>) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, experiment)
    }

    /// Effective config as TOML lines, enough to rerun the experiment.
    pub fn echo(&self) -> Vec<String> {
        let seed = if self.seed > i64::MAX as u64 { format!("\"{}\"", self.seed) } else { self.seed.to_string() };
        let mut lines = vec![format!("experiment = \"{}\"", self.experiment), format!("seed = {seed}")];
        lines.extend(self.params.iter().map(|(k, v)| format!("{k} = {}", echo_value(v))));
        lines
    }

    fn get(&self, key: &str) -> Result<&Value> {
        self.params.get(key).ok_or_else(|| Error::Config(format!("missing key '{key}'")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.get(key)?.as_float().ok_or_else(|| Error::Config(format!("key '{key}' is not a float")))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        v.as_integer()
            .and_then(|i| usize::try_from(i).ok())
            .ok_or_else(|| Error::Config(format!("key '{key}' must be a non-negative integer, got {v}")))
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.get(key)?.as_str().ok_or_else(|| Error::Config(format!("key '{key}' is not a string")))
    }

    pub fn usizes(&self, key: &str) -> Result<Vec<usize>> {
        let v = self.get(key)?;
        v.as_array()
            .and_then(|a| a.iter().map(|x| x.as_integer().and_then(|i| usize::try_from(i).ok())).collect())
            .ok_or_else(|| Error::Config(format!("key '{key}' must be a list of non-negative integers, got {v}")))
    }

    pub fn f64s(&self, key: &str) -> Result<Vec<f64>> {
        let v = self.get(key)?;
        v.as_array()
            .and_then(|a| a.iter().map(Value::as_float).collect())
            .ok_or_else(|| Error::Config(format!("key '{key}' must be a list of floats, got {v}")))
    }
}
