//! Deciding k-anonymity at a radius, the exact regime sweep over all radii,
//! the choice of a minimal generalization and the interval-generalized table.
//!
//! Equivalence classes are the connected components of the radius-`eps`
//! neighborhood graph. A component is a valid class when it has at least `k`
//! members and all of its closed `eps`-balls share a point, that is, it spans
//! a full simplex of the anonymity complex.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_eps, pair_radius, ColumnRole, NormalizedDataset, NumericTable};
use crate::homology::weighted_h0_barcode;
use crate::union_find::DisjointSets;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "component")]
pub enum FailureReason {
    ComponentTooSmall(Vec<usize>),
    ComponentNotSimplex(Vec<usize>),
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (what, rows) = match self {
            Self::ComponentTooSmall(c) => ("component too small", c),
            Self::ComponentNotSimplex(c) => ("component does not span a simplex", c),
        };
        let ids: Vec<String> = rows.iter().map(|r| (r + 1).to_string()).collect();
        write!(f, "{what}: rows {{{}}}", ids.join(","))
    }
}

/// Outcome of a single `(eps, k)` check. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnonymityVerdict {
    pub achieved: bool,
    pub components: Vec<Vec<usize>>,
    pub failure: Option<FailureReason>,
}

impl AnonymityVerdict {
    /// The equivalence classes, present only when achieved.
    pub fn classes(&self) -> Option<&[Vec<usize>]> {
        self.achieved.then_some(self.components.as_slice())
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidK)
    } else {
        Ok(())
    }
}

/// Components of the graph joining points whose closed `eps`-balls meet.
pub fn components_at(data: &NormalizedDataset, eps: f64) -> Result<Vec<Vec<usize>>> {
    check_eps(eps)?;
    let n = data.len();
    let mut sets = DisjointSets::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if pair_radius(data.point(i), data.point(j)) <= eps {
                sets.union(i, j);
            }
        }
    }
    Ok(sets.groups())
}

pub fn check_k_anonymity(data: &NormalizedDataset, eps: f64, k: usize) -> Result<AnonymityVerdict> {
    check_k(k)?;
    let components = components_at(data, eps)?;
    if k > data.len() {
        return Ok(AnonymityVerdict {
            achieved: false,
            components,
            failure: Some(FailureReason::ComponentTooSmall((0..data.len()).collect())),
        });
    }
    let mut failure = None;
    for c in &components {
        if c.len() < k {
            failure = Some(FailureReason::ComponentTooSmall(c.clone()));
            break;
        }
        if data.radius_of(c)? > eps {
            failure = Some(FailureReason::ComponentNotSimplex(c.clone()));
            break;
        }
    }
    Ok(AnonymityVerdict {
        achieved: failure.is_none(),
        components,
        failure,
    })
}

/// A maximal radius interval `[lo, hi)` with a constant valid partition.
/// `hi = None` means the regime extends to infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub lo: f64,
    pub hi: Option<f64>,
    pub classes: Vec<Vec<usize>>,
    pub n_classes: usize,
    pub min_class_size: usize,
}

impl Regime {
    pub fn contains(&self, eps: f64) -> bool {
        self.lo <= eps && self.hi.is_none_or(|h| eps < h)
    }
}

/// Exact sweep over merge radii of the neighborhood graph.
///
/// Between consecutive merges the partition is fixed; on such an interval
/// `[a, b)` anonymity holds from the largest component ball radius on, as
/// long as every component has at least `k` members.
pub fn compute_regimes(data: &NormalizedDataset, k: usize) -> Result<Vec<Regime>> {
    check_k(k)?;
    if k > data.len() {
        return Ok(Vec::new());
    }
    let wb = weighted_h0_barcode(data);
    let snaps = &wb.snapshots;
    let candidates: Vec<usize> = (0..snaps.len())
        .filter(|&i| snaps[i].components.iter().all(|c| c.len() >= k))
        .collect();

    let regimes: Result<Vec<Option<Regime>>> = candidates
        .par_iter()
        .map(|&i| {
            let snap = &snaps[i];
            let hi = snaps.get(i + 1).map(|s| s.eps);
            let mut lo = snap.eps;
            for c in &snap.components {
                lo = lo.max(data.radius_of(c)?);
                if hi.is_some_and(|h| lo >= h) {
                    return Ok(None);
                }
            }
            Ok(Some(Regime {
                lo,
                hi,
                n_classes: snap.components.len(),
                min_class_size: snap.components.iter().map(Vec::len).min().unwrap_or(0),
                classes: snap.components.clone(),
            }))
        })
        .collect();
    Ok(regimes?.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    SmallestEps,
    /// Earliest regime with the most classes.
    #[default]
    MaxClasses,
}

impl std::str::FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "smallest_eps" | "smallest-eps" => Ok(Self::SmallestEps),
            "max_classes" | "max-classes" => Ok(Self::MaxClasses),
            other => Err(format!(
                "unknown objective `{other}` (expected smallest_eps or max_classes)"
            )),
        }
    }
}

pub fn select_regime(regimes: &[Regime], objective: Objective) -> Option<&Regime> {
    match objective {
        Objective::SmallestEps => regimes.first(),
        Objective::MaxClasses => regimes.iter().rev().max_by_key(|r| r.n_classes),
    }
}

pub fn minimal_epsilon(
    data: &NormalizedDataset,
    k: usize,
    objective: Objective,
) -> Result<(f64, Regime)> {
    let regimes = compute_regimes(data, k)?;
    select_regime(&regimes, objective)
        .map(|r| (r.lo, r.clone()))
        .ok_or(Error::Infeasible { k, n: data.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub eps: f64,
    pub achieved: bool,
    pub n_classes: usize,
}

/// Checks every radius of a fixed grid independently.
pub fn grid_sweep(data: &NormalizedDataset, k: usize, grid: &[f64]) -> Result<Vec<GridPoint>> {
    check_k(k)?;
    validate_grid(grid)?;
    grid.par_iter()
        .map(|&eps| {
            let v = check_k_anonymity(data, eps, k)?;
            Ok(GridPoint {
                eps,
                achieved: v.achieved,
                n_classes: v.components.len(),
            })
        })
        .collect()
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    let ok = !grid.is_empty()
        && grid.iter().all(|e| e.is_finite() && *e >= 0.0)
        && grid.windows(2).all(|w| w[0] < w[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidGrid)
    }
}

/// `0, step, 2 step, ...` up to and including `max` (within rounding).
pub fn uniform_grid(step: f64, max: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && max.is_finite() && max >= 0.0) {
        return Err(Error::InvalidGrid);
    }
    let count = (max / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GeneralizedValue {
    Scalar(f64),
    Interval(f64, f64),
}

impl GeneralizedValue {
    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Self::Scalar(v) => v == x,
            Self::Interval(lo, hi) => lo <= x && x <= hi,
        }
    }
}

impl fmt::Display for GeneralizedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scalar(v) => write!(f, "{v}"),
            Self::Interval(lo, hi) => write!(f, "[{lo}-{hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GeneralizedCell {
    Generalized(GeneralizedValue),
    Verbatim(String),
}

impl fmt::Display for GeneralizedCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Generalized(v) => v.fmt(f),
            Self::Verbatim(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedRow {
    /// 0-based index into the source table.
    pub row: usize,
    /// 0-based index into the regime's classes.
    pub class_id: usize,
    pub cells: Vec<GeneralizedCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedTable {
    pub header: Vec<String>,
    pub rows: Vec<GeneralizedRow>,
}

impl GeneralizedTable {
    /// Header and string cells, with a trailing 1-based `class` column.
    pub fn to_records(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut header = self.header.clone();
        header.push("class".into());
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut cells: Vec<String> = r.cells.iter().map(ToString::to_string).collect();
                cells.push((r.class_id + 1).to_string());
                cells
            })
            .collect();
        (header, rows)
    }
}

/// Replaces each quasi-identifier by the `[min, max]` of its class in
/// original units. Identifier columns are always dropped; sensitive columns
/// are kept verbatim only when `passthrough` is set.
pub fn generalize_table(
    table: &NumericTable,
    classes: &[Vec<usize>],
    passthrough: bool,
) -> Result<GeneralizedTable> {
    let n = table.n_rows();
    let mut class_of = vec![usize::MAX; n];
    for (c, members) in classes.iter().enumerate() {
        for &r in members {
            if r >= n || class_of[r] != usize::MAX {
                return Err(Error::NotAPartition { n });
            }
            class_of[r] = c;
        }
    }
    if class_of.contains(&usize::MAX) {
        return Err(Error::NotAPartition { n });
    }

    let d = table.n_quasi();
    let bounds: Vec<Vec<(f64, f64)>> = classes
        .iter()
        .map(|members| {
            (0..d)
                .map(|q| {
                    members
                        .iter()
                        .map(|&r| table.quasi_row(r)[q])
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                            (lo.min(v), hi.max(v))
                        })
                })
                .collect()
        })
        .collect();

    let keep = |role: ColumnRole| match role {
        ColumnRole::QuasiIdentifier => true,
        ColumnRole::Sensitive => passthrough,
        ColumnRole::Identifier => false,
    };
    let header = table
        .columns()
        .iter()
        .filter(|c| keep(c.role))
        .map(|c| c.name.clone())
        .collect();

    let rows = (0..n)
        .map(|r| {
            let class_id = class_of[r];
            let mut q = 0;
            let mut cells = Vec::new();
            for (ci, col) in table.columns().iter().enumerate() {
                if col.role == ColumnRole::QuasiIdentifier {
                    let (lo, hi) = bounds[class_id][q];
                    q += 1;
                    cells.push(GeneralizedCell::Generalized(if lo == hi {
                        GeneralizedValue::Scalar(lo)
                    } else {
                        GeneralizedValue::Interval(lo, hi)
                    }));
                } else if keep(col.role) {
                    cells.push(GeneralizedCell::Verbatim(table.cells()[r][ci].clone()));
                }
            }
            GeneralizedRow {
                row: r,
                class_id,
                cells,
            }
        })
        .collect();

    Ok(GeneralizedTable { header, rows })
}

/// The plain definition: every distinct tuple occurs at least `k` times.
pub fn satisfies_k_anonymity<T: Eq + Hash>(tuples: &[T], k: usize) -> bool {
    let mut counts: HashMap<&T, usize> = HashMap::new();
    for t in tuples {
        *counts.entry(t).or_default() += 1;
    }
    counts.values().all(|&c| c >= k)
}
