//! The subcommands. Each returns the text to print and an exit status;
//! input problems surface as errors instead.

use std::fs;
use std::path::{Path, PathBuf};

use anonytope_core::anonymity::{check_k_anonymity, compute_regimes, grid_sweep, select_regime};
use anonytope_core::categorical::lattice_search;
use anonytope_core::complex::build_filtration;
use anonytope_core::homology::{persistence, weighted_h0_barcode};
use anonytope_core::report::{BarcodeJson, RegimeReport, SearchReportJson, VerdictJson};
use anonytope_core::{generalize_table, normalize_dataset, NormalizedDataset, Objective, Regime};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::ingest::{ingest_categorical, ingest_numeric, load_trees};
use crate::svg;

#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: Vec<String>,
    pub stderr: Vec<String>,
    pub files: Vec<PathBuf>,
    pub code: i32,
}

impl Outcome {
    fn say(&mut self, line: impl Into<String>) {
        self.stdout.push(line.into());
    }

    fn warn(&mut self, line: impl Into<String>) {
        self.stderr.push(line.into());
    }

    fn fail(&mut self, line: impl Into<String>) {
        self.stderr.push(line.into());
        self.code = 2;
    }

    fn write(&mut self, dir: &Path, name: &str, contents: &str) -> CliResult<()> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, dir: &Path, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Config(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(dir, name, &text)
    }
}

fn rows_label(class: &[usize]) -> String {
    let ids: Vec<String> = class.iter().map(|r| (r + 1).to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

fn interval_label(r: &Regime) -> String {
    match r.hi {
        Some(hi) => format!("[{}, {})", r.lo, hi),
        None => format!("[{}, inf)", r.lo),
    }
}

fn regime_line(r: &Regime) -> String {
    let classes: Vec<String> = r.classes.iter().map(|c| rows_label(c)).collect();
    format!(
        "  eps {}  {}: {}",
        interval_label(r),
        classes_label(r.n_classes),
        classes.join(" ")
    )
}

fn classes_label(n: usize) -> String {
    if n == 1 {
        "1 class".to_string()
    } else {
        format!("{n} classes")
    }
}

fn exceeds_rows(k: usize, n: usize) -> String {
    format!("k exceeds row count (k = {k}, {n} rows)")
}

/// The regime closest to `eps` for `k`, or for the row count when `k`
/// exceeds it.
fn nearest_regime(
    data: &NormalizedDataset,
    k: usize,
    eps: Option<f64>,
) -> CliResult<Option<(usize, Regime)>> {
    let k = k.min(data.len());
    let regimes = compute_regimes(data, k)?;
    let gap = |r: &Regime| match eps {
        None => 0.0,
        Some(e) if r.contains(e) => 0.0,
        Some(e) if e < r.lo => r.lo - e,
        Some(e) => e - r.hi.unwrap_or(f64::INFINITY).min(e),
    };
    Ok(regimes
        .into_iter()
        .min_by(|a, b| gap(a).total_cmp(&gap(b)))
        .map(|r| (k, r)))
}

fn report_nearest(
    out: &mut Outcome,
    data: &NormalizedDataset,
    k: usize,
    eps: Option<f64>,
) -> CliResult<()> {
    if let Some((k2, r)) = nearest_regime(data, k, eps)? {
        out.warn(format!(
            "nearest achievable regime (k = {k2}): eps {} with {}",
            interval_label(&r),
            classes_label(r.n_classes)
        ));
    }
    Ok(())
}

fn load_numeric(
    config: &RunConfig,
) -> CliResult<(anonytope_core::NumericTable, NormalizedDataset)> {
    let table = ingest_numeric(config)?;
    let data = normalize_dataset(&table);
    Ok((table, data))
}

pub fn sweep(config: &RunConfig) -> CliResult<Outcome> {
    let (_, data) = load_numeric(config)?;
    let ks = config.ks()?;
    let grid = config.grid()?;
    let dir = config.out_dir();
    let mut out = Outcome::default();

    let regimes: Vec<Vec<Regime>> = ks
        .par_iter()
        .map(|&k| compute_regimes(&data, k))
        .collect::<Result<_, _>>()?;

    for (&k, rs) in ks.iter().zip(&regimes) {
        if k > data.len() {
            out.fail(format!("k = {k}: {}", exceeds_rows(k, data.len())));
            report_nearest(&mut out, &data, k, None)?;
        } else {
            out.say(format!("k = {k}: {} regime(s)", rs.len()));
            for r in rs {
                out.say(regime_line(r));
            }
        }
        if config.wants(Format::Json) {
            out.write_json(
                &dir,
                &format!("regimes_k{k}.json"),
                &RegimeReport::new(k, rs),
            )?;
        }
        if let Some(grid) = &grid {
            let points = grid_sweep(&data, k, grid)?;
            let disagreements = points
                .iter()
                .filter(|g| rs.iter().any(|r| r.contains(g.eps)) != g.achieved)
                .count();
            out.say(format!(
                "  grid: {} radii, {} achieved, {} disagreements with the exact sweep",
                points.len(),
                points.iter().filter(|g| g.achieved).count(),
                disagreements
            ));
            if config.wants(Format::Json) {
                out.write_json(&dir, &format!("grid_k{k}.json"), &points)?;
            }
        }
    }

    let weighted = weighted_h0_barcode(&data);
    let barcode = persistence(&build_filtration(&data, config.dim_cap())?)?;
    if config.wants(Format::Json) {
        out.write_json(
            &dir,
            "barcode.json",
            &BarcodeJson::new(&barcode, Some(&weighted), data.len()),
        )?;
    }
    if config.wants(Format::Svg) {
        let panels: Vec<svg::Panel> = ks
            .iter()
            .zip(&regimes)
            .map(|(&k, rs)| svg::Panel { k, regimes: rs })
            .collect();
        out.write(
            &dir,
            "barcode.svg",
            &svg::render(&barcode, &weighted, &panels),
        )?;
    }
    Ok(out)
}

pub fn check(config: &RunConfig) -> CliResult<Outcome> {
    let (_, data) = load_numeric(config)?;
    let eps = config
        .eps
        .ok_or_else(|| CliError::Config("check needs a radius (--eps)".into()))?;
    let mut out = Outcome::default();
    let mut verdicts = Vec::new();
    for k in config.ks()? {
        let v = check_k_anonymity(&data, eps, k)?;
        if v.achieved {
            let classes: Vec<String> = v.components.iter().map(|c| rows_label(c)).collect();
            out.say(format!(
                "k = {k}, eps = {eps}: achieved with {}: {}",
                classes_label(v.components.len()),
                classes.join(" ")
            ));
        } else if k > data.len() {
            out.fail(format!(
                "k = {k}, eps = {eps}: {}",
                exceeds_rows(k, data.len())
            ));
            report_nearest(&mut out, &data, k, Some(eps))?;
        } else {
            let why = v
                .failure
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_default();
            out.fail(format!("k = {k}, eps = {eps}: not achieved ({why})"));
            report_nearest(&mut out, &data, k, Some(eps))?;
        }
        verdicts.push(VerdictJson::new(eps, k, &v));
    }
    if config.wants(Format::Json) {
        out.write_json(&config.out_dir(), "check.json", &verdicts)?;
    }
    Ok(out)
}

pub fn anonymize(config: &RunConfig) -> CliResult<Outcome> {
    let (table, data) = load_numeric(config)?;
    let ks = config.ks()?;
    let [k] = ks[..] else {
        return Err(CliError::Config("anonymize takes a single k".into()));
    };
    let objective = config.objective.unwrap_or_default();
    let dir = config.out_dir();
    let mut out = Outcome::default();

    if k > data.len() {
        out.fail(exceeds_rows(k, data.len()));
        report_nearest(&mut out, &data, k, config.eps)?;
        return Ok(out);
    }
    let regime = match config.eps {
        Some(eps) => {
            let v = check_k_anonymity(&data, eps, k)?;
            if !v.achieved {
                let why = v
                    .failure
                    .as_ref()
                    .map(ToString::to_string)
                    .unwrap_or_default();
                out.fail(format!("k = {k} is not achieved at eps = {eps} ({why})"));
                report_nearest(&mut out, &data, k, Some(eps))?;
                return Ok(out);
            }
            let regimes = compute_regimes(&data, k)?;
            regimes
                .into_iter()
                .find(|r| r.contains(eps))
                .ok_or_else(|| CliError::Config(format!("no regime contains eps = {eps}")))?
        }
        None => {
            let regimes = compute_regimes(&data, k)?;
            select_regime(&regimes, objective)
                .cloned()
                .ok_or_else(|| CliError::Infeasible(exceeds_rows(k, data.len())))?
        }
    };

    let generalized = generalize_table(
        &table,
        &regime.classes,
        config.keep_sensitive.unwrap_or(false),
    )?;
    let (header, rows) = generalized.to_records();
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("writing CSV: {e}"));
    writer.write_record(&header).map_err(csv_err)?;
    for r in &rows {
        writer.write_record(r).map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Config(format!("writing CSV: {e}")))?;
    out.write(&dir, "anonymized.csv", &String::from_utf8_lossy(&bytes))?;

    let how = match (config.eps, objective) {
        (Some(eps), _) => format!("eps = {eps}"),
        (None, Objective::SmallestEps) => "smallest_eps".to_string(),
        (None, Objective::MaxClasses) => "max_classes".to_string(),
    };
    out.say(format!(
        "k = {k} via {how}: eps {}, {}",
        interval_label(&regime),
        classes_label(regime.n_classes)
    ));
    if config.wants(Format::Json) {
        out.write_json(
            &dir,
            "anonymized_regime.json",
            &RegimeReport::new(k, &[regime]),
        )?;
    }
    Ok(out)
}

pub fn barcode(config: &RunConfig) -> CliResult<Outcome> {
    let (_, data) = load_numeric(config)?;
    let dir = config.out_dir();
    let mut out = Outcome::default();
    let weighted = weighted_h0_barcode(&data);
    let barcode = persistence(&build_filtration(&data, config.dim_cap())?)?;
    for dim in 0..config.dim_cap() {
        let mut bars: Vec<_> = barcode.displayed().filter(|b| b.dim == dim).collect();
        bars.sort_by(|a, b| {
            let end = |d: Option<f64>| d.unwrap_or(f64::INFINITY);
            (a.birth, end(a.death))
                .partial_cmp(&(b.birth, end(b.death)))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        out.say(format!("H{dim}: {} bars", bars.len()));
        for b in bars {
            let death = b.death.map_or("inf".to_string(), |d| d.to_string());
            out.say(format!("  [{}, {death})", b.birth));
        }
    }
    if config.wants(Format::Json) {
        out.write_json(
            &dir,
            "barcode.json",
            &BarcodeJson::new(&barcode, Some(&weighted), data.len()),
        )?;
    }
    if config.wants(Format::Svg) {
        let ks = if config.k.is_empty() {
            vec![1]
        } else {
            config.ks()?
        };
        let regimes: Vec<Vec<Regime>> = ks
            .iter()
            .map(|&k| compute_regimes(&data, k))
            .collect::<Result<_, _>>()?;
        let panels: Vec<svg::Panel> = ks
            .iter()
            .zip(&regimes)
            .map(|(&k, rs)| svg::Panel { k, regimes: rs })
            .collect();
        out.write(
            &dir,
            "barcode.svg",
            &svg::render(&barcode, &weighted, &panels),
        )?;
    }
    Ok(out)
}

pub fn lattice_sweep(config: &RunConfig) -> CliResult<Outcome> {
    let rows = ingest_categorical(config)?;
    let attributes = config.quasi()?.to_vec();
    let trees_path = config
        .trees
        .as_deref()
        .ok_or_else(|| CliError::Config("lattice-sweep needs a tree file (--trees)".into()))?;
    let trees = load_trees(trees_path, &attributes)?;
    let strategy = config.strategy.unwrap_or_default();
    let dir = config.out_dir();
    let mut out = Outcome::default();

    for k in config.ks()? {
        let report = lattice_search(&rows, &trees, k, strategy)?;
        if k > rows.len() {
            out.fail(format!("k = {k}: {}", exceeds_rows(k, rows.len())));
        } else if report.minimal_nodes.is_empty() {
            out.fail(format!("k = {k}: no k-anonymous node found"));
        } else {
            let nodes: Vec<String> = report
                .minimal_nodes
                .iter()
                .map(ToString::to_string)
                .collect();
            out.say(format!(
                "k = {k}: minimal levels {} ({})",
                nodes.join(" "),
                attributes.join(", ")
            ));
        }
        for (i, chain) in report.chains.iter().enumerate() {
            let name = if i == 0 { "lower" } else { "upper" };
            let hit = chain
                .first_anonymous()
                .map_or("none".to_string(), |j| chain.path[j].to_string());
            out.say(format!("  {name} chain: first k-anonymous node {hit}"));
        }
        if let Some(note) = &report.note {
            out.warn(format!("  note: {note}"));
        }
        if config.wants(Format::Json) {
            out.write_json(
                &dir,
                &format!("lattice_k{k}.json"),
                &SearchReportJson::new(&report, attributes.clone()),
            )?;
        }
    }
    Ok(out)
}
