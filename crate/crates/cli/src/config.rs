//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use anonytope_core::anonymity::{uniform_grid, validate_grid, Objective};
use anonytope_core::categorical::Strategy;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            other => Err(format!(
                "unknown format `{other}` (expected json, csv or svg)"
            )),
        }
    }
}

/// Radii for the fixed-grid mode: explicit values or `start:step:stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Range(String),
}

impl GridSpec {
    pub fn parse(text: &str) -> CliResult<Self> {
        if text.contains(':') {
            return Ok(Self::Range(text.to_string()));
        }
        text.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("grid value `{v}` is not a number")))
            })
            .collect::<CliResult<Vec<f64>>>()
            .map(Self::Values)
    }

    pub fn radii(&self) -> CliResult<Vec<f64>> {
        let values = match self {
            Self::Values(v) => v.clone(),
            Self::Range(r) => {
                let parts: Vec<f64> = r
                    .split(':')
                    .map(|p| p.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::Config(format!("grid range `{r}` is malformed")))?;
                let [start, step, stop] = parts[..] else {
                    return Err(CliError::Config(format!(
                        "grid range `{r}` must be start:step:stop"
                    )));
                };
                if !(start >= 0.0 && stop >= start) {
                    return Err(CliError::Config(format!("grid range `{r}` is empty")));
                }
                uniform_grid(step, stop - start)?
                    .into_iter()
                    .map(|e| start + e)
                    .collect()
            }
        };
        validate_grid(&values)?;
        Ok(values)
    }
}

/// Every setting of a run. All fields are optional in the file; flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub quasi: Vec<String>,
    pub identifiers: Vec<String>,
    pub sensitive: Vec<String>,
    pub k: Vec<usize>,
    pub mode: Option<Mode>,
    pub eps: Option<f64>,
    pub grid: Option<GridSpec>,
    pub dim_cap: Option<usize>,
    pub objective: Option<Objective>,
    pub strategy: Option<Strategy>,
    pub trees: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Vec<Format>,
    pub keep_sensitive: Option<bool>,
}

pub const DEFAULT_DIM_CAP: usize = 2;

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config: Self = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        // Relative paths are relative to the file, not the working directory.
        if let Some(base) = path.parent() {
            for p in [&mut config.input, &mut config.trees, &mut config.out]
                .into_iter()
                .flatten()
            {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(config)
    }

    /// Fields set in `flags` replace the ones here.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if flags.$f.is_some() {
                    self.$f = flags.$f;
                }
            )*};
        }
        macro_rules! take_list {
            ($($f:ident),*) => {$(
                if !flags.$f.is_empty() {
                    self.$f = flags.$f;
                }
            )*};
        }
        take!(
            input,
            mode,
            eps,
            grid,
            dim_cap,
            objective,
            strategy,
            trees,
            out,
            keep_sensitive
        );
        take_list!(quasi, identifiers, sensitive, k, format);
        self
    }

    pub fn input(&self) -> CliResult<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::Config("an input file is required (--input)".into()))
    }

    pub fn ks(&self) -> CliResult<Vec<usize>> {
        if self.k.is_empty() {
            return Err(CliError::Config("at least one k is required (--k)".into()));
        }
        if self.k.contains(&0) {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        Ok(self.k.clone())
    }

    pub fn quasi(&self) -> CliResult<&[String]> {
        if self.quasi.is_empty() {
            return Err(CliError::Config(
                "at least one quasi-identifier column is required (--quasi)".into(),
            ));
        }
        Ok(&self.quasi)
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap.unwrap_or(DEFAULT_DIM_CAP)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from("anonytope-out"))
    }

    pub fn wants(&self, format: Format) -> bool {
        if self.format.is_empty() {
            format == Format::Json
        } else {
            self.format.contains(&format)
        }
    }

    pub fn grid(&self) -> CliResult<Option<Vec<f64>>> {
        self.grid.as_ref().map(GridSpec::radii).transpose()
    }
}
