use std::path::Path;

use serde::Deserialize;

use crate::CliError;

/// Values a config file may set; anything else is rejected.
#[derive(Debug, Default, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<u64>,
    pub prec: Option<u32>,
    pub depth: Option<u32>,
    pub val_cap: Option<u64>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Defaults {
    pub p: u64,
    pub prec: u32,
    pub depth: u32,
    pub val_cap: u64,
    pub seed: u64,
    pub budget: u64,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults { p: 7, prec: 8, depth: 1, val_cap: 2, seed: 0, budget: 1_000_000 }
    }
}

impl Defaults {
    pub fn overlay(self, file: &FileConfig) -> Self {
        Defaults {
            p: file.p.unwrap_or(self.p),
            prec: file.prec.unwrap_or(self.prec),
            depth: file.depth.unwrap_or(self.depth),
            val_cap: file.val_cap.unwrap_or(self.val_cap),
            seed: file.seed.unwrap_or(self.seed),
            budget: file.budget.unwrap_or(self.budget),
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse_config(text: &str, origin: &str) -> Result<FileConfig, CliError> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map_or(1, |s| line_of(text, s.start));
        CliError::Usage(format!("{origin}: line {line}: {}", e.message()))
    })
}

/// Built-in defaults overlaid with the file at `path`, if any.
pub fn load_config(path: Option<&Path>) -> Result<Defaults, CliError> {
    let Some(path) = path else { return Ok(Defaults::default()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    Ok(Defaults::default().overlay(&parse_config(&text, &path.display().to_string())?))
}
