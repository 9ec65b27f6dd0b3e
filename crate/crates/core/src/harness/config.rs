use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fidelity::NoiseConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dmpsa,
    Mcsa,
    Rmpsa,
    Smpsa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Dmpsa, Algorithm::Mcsa, Algorithm::Rmpsa, Algorithm::Smpsa];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Dmpsa => "dmpsa",
            Algorithm::Mcsa => "mcsa",
            Algorithm::Rmpsa => "rmpsa",
            Algorithm::Smpsa => "smpsa",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    AvgCapacity,
    AvgDistance,
    NodeCount,
    DemandCount,
    Iterations,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::AvgCapacity,
        SweepAxis::AvgDistance,
        SweepAxis::NodeCount,
        SweepAxis::DemandCount,
        SweepAxis::Iterations,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::AvgCapacity => "avg_capacity",
            SweepAxis::AvgDistance => "avg_distance",
            SweepAxis::NodeCount => "node_count",
            SweepAxis::DemandCount => "demand_count",
            SweepAxis::Iterations => "iterations",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sweep axis {s:?}")))
    }
}

/// One experiment: a base instance shape plus an optional sweep axis.
/// Missing keys take the defaults below; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub node_count: usize,
    pub demand_count: usize,
    pub avg_capacity: f64,
    pub avg_distance_km: f64,
    pub alpha_per_km: f64,
    pub algorithms: Vec<Algorithm>,
    pub iterations: usize,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            node_count: 100,
            demand_count: 5,
            avg_capacity: 9.09,
            avg_distance_km: 7.44,
            alpha_per_km: 0.05,
            algorithms: Algorithm::ALL.to_vec(),
            iterations: 100,
            master_seed: 0,
            sweep_axis: None,
            sweep_values: Vec::new(),
            noise: None,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn integral(axis: SweepAxis, value: f64) -> Result<usize> {
    if value.fract() != 0.0 || !(value >= 1.0) || value > u32::MAX as f64 {
        return Err(config_err(format!("{axis} needs a positive integer, got {value}")));
    }
    Ok(value as usize)
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Algorithms to run, sorted by name and deduplicated.
    pub fn algorithm_set(&self) -> Vec<Algorithm> {
        let mut a = self.algorithms.clone();
        a.sort();
        a.dedup();
        a
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.node_count;
        if n < 2 {
            return Err(config_err(format!("node_count {n} is below 2")));
        }
        let pairs = n * (n - 1) / 2;
        if self.demand_count == 0 || self.demand_count > pairs {
            return Err(config_err(format!("demand_count {} outside 1..={pairs}", self.demand_count)));
        }
        if !(self.avg_capacity >= 1.0) || !self.avg_capacity.is_finite() {
            return Err(config_err(format!("avg_capacity {} must be finite and at least 1", self.avg_capacity)));
        }
        if !(self.avg_distance_km > 0.0) || !self.avg_distance_km.is_finite() {
            return Err(config_err(format!("avg_distance_km {} must be positive", self.avg_distance_km)));
        }
        if !(self.alpha_per_km >= 0.0) || !self.alpha_per_km.is_finite() {
            return Err(config_err(format!("alpha_per_km {} must be non-negative", self.alpha_per_km)));
        }
        if self.algorithms.is_empty() {
            return Err(config_err("no algorithms selected"));
        }
        if self.iterations == 0 {
            return Err(config_err("iterations must be positive"));
        }
        if let Some(axis) = self.sweep_axis {
            if self.sweep_values.is_empty() {
                return Err(config_err(format!("sweep over {axis} has no values")));
            }
            for &v in &self.sweep_values {
                self.with_axis_value(axis, v)?;
            }
        }
        if let Some(noise) = &self.noise {
            noise.validate().map_err(|e| config_err(e.to_string()))?;
        }
        Ok(())
    }

    /// Copy of this config with `axis` set to `value`, validated except for
    /// the sweep fields.
    pub fn with_axis_value(&self, axis: SweepAxis, value: f64) -> Result<Self> {
        let mut c = self.clone();
        match axis {
            SweepAxis::AvgCapacity => c.avg_capacity = value,
            SweepAxis::AvgDistance => c.avg_distance_km = value,
            SweepAxis::NodeCount => c.node_count = integral(axis, value)?,
            SweepAxis::DemandCount => c.demand_count = integral(axis, value)?,
            SweepAxis::Iterations => c.iterations = integral(axis, value)?,
        }
        c.sweep_axis = None;
        c.sweep_values.clear();
        c.validate()?;
        Ok(c)
    }
}
