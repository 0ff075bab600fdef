use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::inference::AttackConfig;
use crate::strategies::{ObservationMode, StrategySpec, DEFAULT_CALIBRATION_DRAWS};

/// Two-balls parameters `(r, R, alpha, beta)` of one comparison setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoBallsSetting {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl TwoBallsSetting {
    pub const fn new(r: f64, big_r: f64, alpha: f64, beta: f64) -> Self {
        TwoBallsSetting { r, big_r, alpha, beta }
    }

    pub fn spec(&self) -> Result<StrategySpec> {
        StrategySpec::two_balls(self.r, self.big_r, self.alpha, self.beta)
    }
}

/// The six settings of the published comparison table.
pub const TABLE1_SETTINGS: [TwoBallsSetting; 6] = [
    TwoBallsSetting::new(1.0, 3.0, 4.0, 4.0),
    TwoBallsSetting::new(1.0, 4.0, 4.0, 4.0),
    TwoBallsSetting::new(2.0, 5.0, 4.0, 4.0),
    TwoBallsSetting::new(1.0, 5.0, 4.0, 2.0),
    TwoBallsSetting::new(1.0, 5.0, 4.0, 4.0),
    TwoBallsSetting::new(1.0, 5.0, 2.0, 4.0),
];

/// Printed reference values for [`TABLE1_SETTINGS`]: (mean SP, TB MSE median, RR MSE median).
pub const TABLE1_PUBLISHED: [(f64, f64, f64); 6] = [
    (8.34, 0.25, 0.03),
    (15.34, 0.48, 0.04),
    (23.23, 0.69, 0.13),
    (24.29, 0.69, 0.05),
    (24.42, 0.78, 0.04),
    (24.71, 0.77, 0.02),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticThresholds {
    pub max_rhat: f64,
    pub min_ess: f64,
}

impl Default for DiagnosticThresholds {
    fn default() -> Self {
        DiagnosticThresholds {
            max_rhat: 1.05,
            min_ess: 400.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub repeats: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![10, 25, 50, 100, 200],
            repeats: 5,
        }
    }
}

/// A single attack for the `attack` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SingleAttackConfig {
    pub strategy: StrategySpec,
    pub n: usize,
    pub theta: Point,
}

impl Default for SingleAttackConfig {
    fn default() -> Self {
        SingleAttackConfig {
            strategy: StrategySpec::two_balls(1.0, 3.0, 4.0, 4.0).expect("valid default"),
            n: 50,
            theta: Point::ORIGIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObfuscateConfig {
    /// Track files (`t,x,y` CSV) of one user.
    pub tracks: Vec<PathBuf>,
    pub theta: Point,
    pub strategy: StrategySpec,
}

impl Default for ObfuscateConfig {
    fn default() -> Self {
        ObfuscateConfig {
            tracks: Vec::new(),
            theta: Point::ORIGIN,
            strategy: StrategySpec::two_balls(1.0, 3.0, 4.0, 4.0).expect("valid default"),
        }
    }
}

fn default_settings() -> Vec<TwoBallsSetting> {
    TABLE1_SETTINGS.to_vec()
}
fn default_n_trajectories() -> usize {
    50
}
fn default_n_replicates() -> usize {
    100
}
fn default_sample_sizes() -> Vec<usize> {
    vec![5, 10, 20, 50, 100, 200]
}
fn default_curve_setting() -> TwoBallsSetting {
    TABLE1_SETTINGS[0]
}
fn default_calibration_draws() -> usize {
    DEFAULT_CALIBRATION_DRAWS
}
fn default_histogram_draws() -> usize {
    20_000
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

/// Experiment description, read from JSON. Only `master_seed` is required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub master_seed: u64,
    #[serde(default = "default_settings")]
    pub settings: Vec<TwoBallsSetting>,
    #[serde(default = "default_n_trajectories")]
    pub n_trajectories: usize,
    #[serde(default = "default_n_replicates")]
    pub n_replicates: usize,
    /// Sample sizes for the MSE-vs-n curve.
    #[serde(default = "default_sample_sizes")]
    pub sample_sizes: Vec<usize>,
    #[serde(default = "default_curve_setting")]
    pub curve_setting: TwoBallsSetting,
    #[serde(default = "default_calibration_draws")]
    pub calibration_draws: usize,
    /// SP draws per strategy for the density histograms of the curve run.
    #[serde(default = "default_histogram_draws")]
    pub histogram_draws: usize,
    #[serde(default = "default_mode")]
    pub observation_mode: ObservationMode,
    #[serde(default)]
    pub attack: AttackConfig,
    #[serde(default)]
    pub diagnostics: DiagnosticThresholds,
    #[serde(default)]
    pub bench: BenchConfig,
    #[serde(default)]
    pub single: SingleAttackConfig,
    #[serde(default)]
    pub obfuscate: ObfuscateConfig,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

fn default_mode() -> ObservationMode {
    ObservationMode::Exact
}

impl ScenarioConfig {
    /// All defaults with the given seed.
    pub fn new(master_seed: u64) -> Self {
        serde_json::from_value(serde_json::json!({ "master_seed": master_seed })).expect("defaults deserialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a config file; `seed` (if given) overrides or supplies `master_seed`.
    pub fn load(path: &Path, seed: Option<u64>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let (Some(s), Some(obj)) = (seed, value.as_object_mut()) {
            obj.insert("master_seed".into(), s.into());
        }
        let cfg: ScenarioConfig = serde_json::from_value(value).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_trajectories == 0 {
            return bad("n_trajectories must be >= 1".into());
        }
        if self.n_replicates == 0 {
            return bad("n_replicates must be >= 1".into());
        }
        if self.settings.is_empty() {
            return bad("settings must not be empty".into());
        }
        if self.sample_sizes.is_empty() || self.sample_sizes[0] == 0 || self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "sample_sizes must be positive and strictly increasing, got {:?}",
                self.sample_sizes
            ));
        }
        if self.calibration_draws < 1000 {
            return bad(format!("calibration_draws must be >= 1000, got {}", self.calibration_draws));
        }
        if self.histogram_draws == 0 {
            return bad("histogram_draws must be >= 1".into());
        }
        if self.bench.repeats == 0 || self.bench.sizes.contains(&0) {
            return bad("bench sizes and repeats must be positive".into());
        }
        if self.single.n == 0 {
            return bad("single.n must be >= 1".into());
        }
        if !(self.diagnostics.max_rhat >= 1.0) || !(self.diagnostics.min_ess >= 0.0) {
            return bad(format!("invalid diagnostic thresholds {:?}", self.diagnostics));
        }
        if let ObservationMode::Simulated { sigma2, dt } = self.observation_mode {
            if !(sigma2 > 0.0 && sigma2.is_finite()) || dt.is_some_and(|d| !(d > 0.0 && d.is_finite())) {
                return bad(format!("invalid simulated observation mode {:?}", self.observation_mode));
            }
        }
        for s in self.settings.iter().chain([&self.curve_setting]) {
            s.spec().map_err(|e| Error::Config(format!("setting {s:?}: {e}")))?;
        }
        self.attack.sampler.validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.attack.quadrature_nodes < 4 {
            return bad("attack.quadrature_nodes must be >= 4".into());
        }
        Ok(())
    }
}
