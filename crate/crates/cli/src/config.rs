//! Experiment configuration: one TOML file with nested tables, unknown keys
//! rejected. A manifest.json written by a previous run can be passed back as
//! the config (its resolved `config` table is reused verbatim).

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use bzl_core::weights::{Gaussian, GaussianBump, Power, SinPerturbed, WeightSequence};
use bzl_core::Complex64;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Gaussian {
        #[serde(default = "default_scale")]
        scale: f64,
    },
    Power {
        p: u32,
    },
    GaussianBump {
        #[serde(default)]
        amp_exponent: f64,
        #[serde(default = "default_bump_center")]
        bump_center: [f64; 2],
        #[serde(default = "default_bump_radius")]
        bump_radius: f64,
    },
    SinPerturbed {},
}

fn default_scale() -> f64 {
    0.5
}
fn default_bump_center() -> [f64; 2] {
    [0.5, 0.0]
}
fn default_bump_radius() -> f64 {
    0.3
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Gaussian { scale: 0.5 }
    }
}

impl WeightSpec {
    pub fn build(&self) -> WeightSequence {
        match *self {
            WeightSpec::Gaussian { scale } => Arc::new(Gaussian { scale }),
            WeightSpec::Power { p } => Arc::new(Power { p }),
            WeightSpec::GaussianBump { amp_exponent, bump_center, bump_radius } => {
                Arc::new(GaussianBump {
                    amp_exponent,
                    center: Complex64::new(bump_center[0], bump_center[1]),
                    radius: bump_radius,
                })
            }
            WeightSpec::SinPerturbed {} => Arc::new(SinPerturbed),
        }
    }

    pub fn name(&self) -> String {
        match self {
            WeightSpec::Gaussian { scale } => format!("gaussian(scale={scale})"),
            WeightSpec::Power { p } => format!("power(p={p})"),
            WeightSpec::GaussianBump { amp_exponent, .. } => {
                format!("gaussian_bump(amp_exponent={amp_exponent})")
            }
            WeightSpec::SinPerturbed {} => "sin_perturbed".to_string(),
        }
    }
}

/// "auto" or an explicit value.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr<T> {
    Auto(String),
    Value(T),
}

impl<T: Copy> AutoOr<T> {
    pub fn resolve(&self, auto: T) -> Result<T, String> {
        match self {
            AutoOr::Value(v) => Ok(*v),
            AutoOr::Auto(s) if s == "auto" => Ok(auto),
            AutoOr::Auto(s) => Err(format!("expected \"auto\" or a value, got \"{s}\"")),
        }
    }
}

impl<T> Default for AutoOr<T> {
    fn default() -> Self {
        AutoOr::Auto("auto".to_string())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSpec {
    #[serde(rename = "R")]
    pub r: AutoOr<f64>,
    pub n_radial: AutoOr<usize>,
    pub n_angular: AutoOr<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestFunctionSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Default for TestFunctionSpec {
    fn default() -> Self {
        TestFunctionSpec { center: [0.0, 0.0], radius: 0.6 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub weight: WeightSpec,
    /// Degree for single-degree experiments.
    pub n: usize,
    /// Degree schedule for sweeps (decay-fit, conditions, hypothesis-check).
    pub n_list: Option<Vec<usize>>,
    pub trials: usize,
    pub seed: u64,
    pub test_function: TestFunctionSpec,
    pub quadrature: QuadratureSpec,
    /// Grid resolution for the (c1) supremum.
    pub grid_size: usize,
    /// Radii sampled by decay-fit.
    pub r_min: f64,
    pub r_max: f64,
    pub r_count: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            weight: WeightSpec::default(),
            n: 50,
            n_list: None,
            trials: 2000,
            seed: 0,
            test_function: TestFunctionSpec::default(),
            quadrature: QuadratureSpec::default(),
            grid_size: 8,
            r_min: 0.1,
            r_max: 0.8,
            r_count: 15,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), String> {
        if self.trials == 0 {
            return Err("config key `trials`: must be at least 1".to_string());
        }
        if self.n == 0 {
            return Err("config key `n`: must be at least 1".to_string());
        }
        if let Some(list) = &self.n_list {
            if list.iter().any(|&n| n == 0) {
                return Err("config key `n_list`: entries must be at least 1".to_string());
            }
        }
        if !(self.test_function.radius > 0.0) {
            return Err("config key `test_function.radius`: must be positive".to_string());
        }
        if !(self.r_min > 0.0 && self.r_max > self.r_min) {
            return Err("config keys `r_min`/`r_max`: need 0 < r_min < r_max".to_string());
        }
        if self.r_count < 4 {
            return Err("config key `r_count`: need at least 4 radii".to_string());
        }
        if self.grid_size == 0 {
            return Err("config key `grid_size`: must be at least 1".to_string());
        }
        Ok(())
    }
}

/// Load a config from TOML, or reuse the resolved config embedded in a
/// previously written manifest.json.
pub fn load_config(path: &Path) -> Result<Config, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let cfg: Config = if path.extension().is_some_and(|e| e == "json") {
        let manifest: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| format!("manifest parse error: {e}"))?;
        let inner = manifest
            .get("config")
            .ok_or_else(|| "manifest has no `config` table".to_string())?;
        serde_json::from_value(inner.clone()).map_err(|e| format!("config parse error: {e}"))?
    } else {
        toml::from_str(&text).map_err(|e| format!("config parse error: {e}"))?
    };
    cfg.validate()?;
    Ok(cfg)
}
