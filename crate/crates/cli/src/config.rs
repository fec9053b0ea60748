//! Optional configuration file, pointed at by the `AQM_CONFIG`
//! environment variable. Command-line flags override config values,
//! which override built-in defaults.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

/// Environment variable holding the path of the default config file.
pub const CONFIG_ENV_VAR: &str = "AQM_CONFIG";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dot_pitch: Option<f64>,
    pub distance: Option<f64>,
    pub symmetry: Option<f64>,
    pub f_max: Option<f64>,
    /// Theoretical display maxima as "WxH".
    pub max: Option<String>,
    /// Comma-separated QP ladder, e.g. "22,27,32,37".
    pub qp_ladder: Option<String>,
    /// Default output format: "text" or "json".
    pub format: Option<String>,
}

/// Loads the config file named by `AQM_CONFIG`, or an empty config when
/// the variable is unset. A set-but-unreadable path is an error rather
/// than a silent fallback.
pub fn load() -> Result<FileConfig> {
    match std::env::var_os(CONFIG_ENV_VAR) {
        None => Ok(FileConfig::default()),
        Some(path) => {
            let path = Path::new(&path);
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            toml::from_str(&text)
                .with_context(|| format!("parsing config file {}", path.display()))
        }
    }
}
