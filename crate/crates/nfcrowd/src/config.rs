use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use nfcrowd_core::harness::ScenarioConfig;

/// Reads a JSON scenario file. Unknown keys are rejected, missing ones take
/// their defaults.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = serde_json::from_str(text)?;
    cfg.validate()?;
    Ok(cfg)
}
