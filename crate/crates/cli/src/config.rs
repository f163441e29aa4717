//! Experiment configuration files and their validation.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::Context;
use orbit_angles::angular::AngleInterval;
use orbit_angles::lattice::DEFAULT_BUDGET;
use orbit_angles::{GroupSpec, Point};
use serde::{Deserialize, Serialize};

/// Invalid configuration or flag value (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupName {
    #[serde(rename = "SL2Z")]
    Sl2z,
    #[serde(rename = "GammaN")]
    GammaN,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    pub kind: GroupName,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u64>,
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig { kind: GroupName::Sl2z, level: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsConfig {
    pub z0: [f64; 2],
    pub z1: [f64; 2],
    pub w: [f64; 2],
}

impl Default for PointsConfig {
    fn default() -> Self {
        PointsConfig { z0: [0.0, 1.0], z1: [0.0, 1.0], w: [0.0, 1.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalConfig {
    pub start: f64,
    pub length: f64,
}

impl Default for IntervalConfig {
    fn default() -> Self {
        IntervalConfig { start: 0.0, length: 0.25 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Defaults to CSV for tables and JSON for reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn default_thresholds() -> Vec<f64> {
    vec![1e3, 1e4]
}

fn default_bins() -> usize {
    8
}

fn default_n_max() -> u32 {
    3
}

fn default_m() -> u32 {
    50
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

fn default_s_values() -> Vec<f64> {
    vec![1.1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub group: GroupConfig,
    #[serde(default)]
    pub points: PointsConfig,
    /// Cosh-valued radii `X = cosh R`.
    #[serde(default = "default_thresholds")]
    pub thresholds: Vec<f64>,
    #[serde(default)]
    pub interval: IntervalConfig,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(rename = "M", default = "default_m")]
    pub m: u32,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Worker threads; 0 lets rayon decide.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "default_s_values")]
    pub s_values: Vec<f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every field has a default")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| invalid(format!("config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> anyhow::Result<Experiment> {
        let group = match (self.group.kind, self.group.level) {
            (GroupName::Sl2z, None | Some(1)) => GroupSpec::sl2z(),
            (GroupName::Sl2z, Some(n)) => return Err(invalid(format!("SL2Z does not take a level (got N = {n})"))),
            (GroupName::GammaN, Some(n)) => GroupSpec::gamma(n)?,
            (GroupName::GammaN, None) => return Err(invalid("GammaN needs a level N")),
        };
        let point = |name: &str, p: [f64; 2]| {
            Point::new(p[0], p[1]).map_err(|e| invalid(format!("{name}: {e}")))
        };
        if self.thresholds.is_empty() {
            return Err(invalid("thresholds must not be empty"));
        }
        if let Some(x) = self.thresholds.iter().find(|x| !(x.is_finite() && **x >= 1.0)) {
            return Err(invalid(format!("threshold {x} must be finite and >= 1")));
        }
        let interval = AngleInterval::new(self.interval.start, self.interval.length)
            .map_err(|e| invalid(e.to_string()))?;
        if self.budget < 1 {
            return Err(invalid("budget must be at least 1"));
        }
        if self.bins < 1 {
            return Err(invalid("bins must be at least 1"));
        }
        if let Some(s) = self.s_values.iter().find(|s| !(**s > 1.0 && s.is_finite())) {
            return Err(invalid(format!("s = {s} must exceed 1")));
        }
        Ok(Experiment {
            group,
            z0: point("z0", self.points.z0)?,
            z1: point("z1", self.points.z1)?,
            w: point("w", self.points.w)?,
            thresholds: self.thresholds.clone(),
            interval,
            bins: self.bins,
            n_max: self.n_max,
            m: self.m,
            budget: self.budget,
            threads: self.threads,
            s_values: self.s_values.clone(),
            format: self.output.format,
            path: self.output.path.clone(),
        })
    }
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub group: GroupSpec,
    pub z0: Point,
    pub z1: Point,
    pub w: Point,
    pub thresholds: Vec<f64>,
    pub interval: AngleInterval,
    pub bins: usize,
    pub n_max: u32,
    pub m: u32,
    pub budget: usize,
    pub threads: usize,
    pub s_values: Vec<f64>,
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

impl Experiment {
    pub fn max_threshold(&self) -> f64 {
        self.thresholds.iter().copied().fold(1.0, f64::max)
    }
}
