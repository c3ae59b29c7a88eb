//! Optional TOML configuration. Every key mirrors a command-line flag of
//! the same name; flags take precedence.

use std::path::PathBuf;

use drsn::borel::BorelKind;
use drsn::sectorial::GeometryOverrides;
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub normalize: NormalizeConfig,
    pub borel: BorelConfig,
    pub sector: SectorConfig,
    pub painleve: PainleveConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizeConfig {
    pub input: Option<PathBuf>,
    pub order: Option<usize>,
    pub x_order: Option<usize>,
    pub ydeg: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BorelConfig {
    pub series: Option<PathBuf>,
    pub direction: Option<f64>,
    pub eval: Option<String>,
    pub kind: Option<BorelKind>,
    pub pade: Option<[usize; 2]>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SignArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorConfig {
    pub input: Option<PathBuf>,
    pub order: Option<usize>,
    pub base: Option<String>,
    pub sign: Option<SignArg>,
    pub prepared: Option<bool>,
    pub ydeg: Option<usize>,
    pub emit: Option<PathBuf>,
    pub residual_check: Option<bool>,
    pub tol_path: Option<f64>,
    pub rtol: Option<f64>,
    pub t_end: Option<f64>,
    pub out: Option<PathBuf>,
    pub geometry: GeometryOverrides,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PainleveConfig {
    pub order: Option<usize>,
    pub x_order: Option<usize>,
    pub ydeg: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Parse a configuration file.
pub fn parse_config(text: &str) -> std::result::Result<FileConfig, toml::de::Error> {
    toml::from_str(text)
}

/// Read and parse a configuration file.
pub fn load_config(path: &std::path::Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text).map_err(|e| CliError::ConfigFile {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
