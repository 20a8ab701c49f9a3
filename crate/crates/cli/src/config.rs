//! Optional TOML defaults. Every key is optional and sits in the table of
//! the subcommand it applies to; `jobs` is top-level.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub jobs: Option<u16>,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub curve: CurveConfig,
    #[serde(default)]
    pub encode: EncodeConfig,
    #[serde(default)]
    pub perturb: PerturbConfig,
    #[serde(default)]
    pub grad_check: GradCheckConfig,
    #[serde(default)]
    pub match_demo: MatchDemoConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub interp: Option<String>,
    pub max_dets: Option<u32>,
    pub max_warnings: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub k: Option<Vec<f64>>,
    pub step: Option<f64>,
    pub radius: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeConfig {
    pub radius: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbConfig {
    pub deltas: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
    pub interp: Option<String>,
    pub k_range: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradCheckConfig {
    pub instances: Option<u32>,
    pub step: Option<f64>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchDemoConfig {
    pub class_weight: Option<f64>,
    pub bbox_weight: Option<f64>,
    pub angle_weight: Option<f64>,
    pub skewiou_weight: Option<f64>,
    pub image_size: Option<[f64; 2]>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
}
