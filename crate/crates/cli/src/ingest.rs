//! CSV ingestion into numeric tables or categorical rows.

use std::path::Path;

use anonytope_core::categorical::{GeneralizationTree, TreeSpec};
use anonytope_core::{Column, ColumnRole, NumericTable};
use serde::Deserialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub struct RawCsv {
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

pub fn read_csv(path: &Path) -> CliResult<RawCsv> {
    let csv_err = |e: csv::Error| CliError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let records = reader
        .records()
        .map(|r| r.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()
        .map_err(csv_err)?;
    if header.iter().all(String::is_empty) || records.is_empty() {
        return Err(CliError::NoDataRows {
            path: path.to_path_buf(),
        });
    }
    Ok(RawCsv { header, records })
}

fn position(header: &[String], name: &str) -> CliResult<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::MissingColumn(name.to_string()))
}

/// Columns not named in the configuration are treated as sensitive.
pub fn ingest_numeric(config: &RunConfig) -> CliResult<NumericTable> {
    let raw = read_csv(config.input()?)?;
    let quasi = config.quasi()?;
    for name in quasi
        .iter()
        .chain(&config.identifiers)
        .chain(&config.sensitive)
    {
        position(&raw.header, name)?;
    }
    let columns = raw
        .header
        .iter()
        .map(|h| {
            let role = if quasi.contains(h) {
                ColumnRole::QuasiIdentifier
            } else if config.identifiers.contains(h) {
                ColumnRole::Identifier
            } else {
                ColumnRole::Sensitive
            };
            Column::new(h.clone(), role)
        })
        .collect();
    Ok(NumericTable::new(columns, raw.records)?)
}

/// Quasi-identifier cells in configuration order.
pub fn ingest_categorical(config: &RunConfig) -> CliResult<Vec<Vec<String>>> {
    let raw = read_csv(config.input()?)?;
    let idx: Vec<usize> = config
        .quasi()?
        .iter()
        .map(|q| position(&raw.header, q))
        .collect::<CliResult<_>>()?;
    Ok(raw
        .records
        .iter()
        .map(|r| {
            idx.iter()
                .map(|&i| r.get(i).cloned().unwrap_or_default())
                .collect()
        })
        .collect())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeFile {
    tree: Vec<TreeSpec>,
}

/// Loads the tree file and orders its trees like `attributes`.
pub fn load_trees(path: &Path, attributes: &[String]) -> CliResult<Vec<GeneralizationTree>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let file: TreeFile =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    attributes
        .iter()
        .map(|a| {
            let spec = file
                .tree
                .iter()
                .find(|t| &t.attribute == a)
                .ok_or_else(|| {
                    CliError::Config(format!("no generalization tree for attribute `{a}`"))
                })?;
            Ok(GeneralizationTree::from_spec(spec)?)
        })
        .collect()
}
