//! The JSON report document.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Thresholds behind the pass verdict, echoed in every report.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Tolerances {
    pub skew: f64,
    pub divergence: f64,
    pub constant_length: f64,
    pub divergence_identity: f64,
    pub killing: f64,
    pub system: f64,
    pub lagrangian: f64,
    pub fit: f64,
    pub volume: f64,
    pub roundtrip: f64,
}

impl Tolerances {
    pub fn for_mode(analytic: bool) -> Self {
        let r = if analytic { 1e-8 } else { 1e-4 };
        Tolerances {
            skew: r,
            divergence: r,
            constant_length: r,
            divergence_identity: r,
            killing: 1e-6,
            system: r,
            lagrangian: r,
            fit: r,
            volume: 1e-3,
            roundtrip: 1e-9,
        }
    }

    /// Applies `name=value`.
    pub fn set(&mut self, spec: &str) -> Result<(), String> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| format!("--tol expects name=value, got '{spec}'"))?;
        let v: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| format!("--tol {name}: '{value}' is not a nonnegative real"))?;
        let slot = match name {
            "skew" => &mut self.skew,
            "divergence" => &mut self.divergence,
            "constant_length" => &mut self.constant_length,
            "divergence_identity" => &mut self.divergence_identity,
            "killing" => &mut self.killing,
            "system" => &mut self.system,
            "lagrangian" => &mut self.lagrangian,
            "fit" => &mut self.fit,
            "volume" => &mut self.volume,
            "roundtrip" => &mut self.roundtrip,
            _ => return Err(format!("--tol: unknown tolerance '{name}'")),
        };
        *slot = v;
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub family: Option<String>,
    pub a: Option<[f64; 3]>,
    pub b: Option<[f64; 3]>,
    pub samples: usize,
    pub volume_samples: usize,
    pub seed: u64,
    pub deriv: String,
    pub h: f64,
    pub tolerances: Tolerances,
    pub out: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub config: ConfigEcho,
    pub metrics: BTreeMap<String, Value>,
    pub pass: bool,
    pub duration_seconds: f64,
}

/// Metric map with typed insertion helpers.
#[derive(Default)]
pub struct Metrics(pub BTreeMap<String, Value>);

impl Metrics {
    pub fn num(&mut self, key: impl Into<String>, v: f64) {
        self.0.insert(key.into(), Value::from(v));
    }

    pub fn opt(&mut self, key: impl Into<String>, v: Option<f64>) {
        self.0.insert(key.into(), v.map_or(Value::Null, Value::from));
    }

    pub fn opt_int(&mut self, key: impl Into<String>, v: Option<i64>) {
        self.0.insert(key.into(), v.map_or(Value::Null, Value::from));
    }

    pub fn int(&mut self, key: impl Into<String>, v: i64) {
        self.0.insert(key.into(), Value::from(v));
    }

    pub fn flag(&mut self, key: impl Into<String>, v: bool) {
        self.0.insert(key.into(), Value::from(v));
    }

    pub fn text(&mut self, key: impl Into<String>, v: impl Into<String>) {
        self.0.insert(key.into(), Value::from(v.into()));
    }

    pub fn list(&mut self, key: impl Into<String>, v: &[String]) {
        self.0.insert(key.into(), Value::from(v.to_vec()));
    }
}
