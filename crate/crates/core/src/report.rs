//! JSON report shapes. Row ids here are 1-based; the library API is 0-based.

use serde::{Deserialize, Serialize};

use crate::anonymity::{AnonymityVerdict, FailureReason, Regime};
use crate::categorical::{ChainReport, SearchReport, Strategy};
use crate::homology::{Barcode, WeightedBarcode};

fn one_based(classes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    classes
        .iter()
        .map(|c| c.iter().map(|r| r + 1).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarJson {
    pub dim: usize,
    pub birth: f64,
    pub death: Option<f64>,
    pub weight_steps: Option<Vec<(f64, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarcodeJson {
    pub bars: Vec<BarJson>,
    pub n_points: usize,
}

impl BarcodeJson {
    /// `H0` bars come from `weighted` when given, so they carry weights;
    /// higher bars come from `barcode`.
    pub fn new(barcode: &Barcode, weighted: Option<&WeightedBarcode>, n_points: usize) -> Self {
        let mut bars = Vec::new();
        match weighted {
            Some(w) => {
                let mut h0: Vec<&_> = w.h0_bars.iter().collect();
                h0.sort_by(|a, b| {
                    let key = |d: Option<f64>| d.unwrap_or(f64::INFINITY);
                    key(a.death)
                        .total_cmp(&key(b.death))
                        .then(a.vertex.cmp(&b.vertex))
                });
                bars.extend(h0.into_iter().map(|b| BarJson {
                    dim: 0,
                    birth: b.birth,
                    death: b.death,
                    weight_steps: Some(b.weight_steps.clone()),
                }));
            }
            None => bars.extend(barcode.of_dim(0).map(|b| BarJson {
                dim: 0,
                birth: b.birth,
                death: b.death,
                weight_steps: None,
            })),
        }
        bars.extend(barcode.bars.iter().filter(|b| b.dim > 0).map(|b| BarJson {
            dim: b.dim,
            birth: b.birth,
            death: b.death,
            weight_steps: None,
        }));
        Self { bars, n_points }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeJson {
    pub eps_lo: f64,
    pub eps_hi: Option<f64>,
    pub n_classes: usize,
    pub classes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeReport {
    pub k: usize,
    pub regimes: Vec<RegimeJson>,
}

impl RegimeReport {
    pub fn new(k: usize, regimes: &[Regime]) -> Self {
        Self {
            k,
            regimes: regimes
                .iter()
                .map(|r| RegimeJson {
                    eps_lo: r.lo,
                    eps_hi: r.hi,
                    n_classes: r.n_classes,
                    classes: one_based(&r.classes),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureJson {
    pub kind: String,
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictJson {
    pub eps: f64,
    pub k: usize,
    pub achieved: bool,
    pub classes: Option<Vec<Vec<usize>>>,
    pub failure: Option<FailureJson>,
}

impl VerdictJson {
    pub fn new(eps: f64, k: usize, v: &AnonymityVerdict) -> Self {
        Self {
            eps,
            k,
            achieved: v.achieved,
            classes: v.classes().map(one_based),
            failure: v.failure.as_ref().map(|f| {
                let (kind, rows) = match f {
                    FailureReason::ComponentTooSmall(c) => ("component_too_small", c),
                    FailureReason::ComponentNotSimplex(c) => ("component_not_simplex", c),
                };
                FailureJson {
                    kind: kind.into(),
                    rows: rows.iter().map(|r| r + 1).collect(),
                }
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainStepJson {
    pub levels: Vec<usize>,
    pub n_classes: usize,
    pub anonymous: bool,
    pub classes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainBarJson {
    pub row: usize,
    pub birth: usize,
    pub death: Option<usize>,
    pub weight_steps: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainReportJson {
    pub k: usize,
    pub steps: Vec<ChainStepJson>,
    pub bars: Vec<ChainBarJson>,
}

impl ChainReportJson {
    pub fn new(r: &ChainReport) -> Self {
        Self {
            k: r.k,
            steps: r
                .path
                .iter()
                .zip(&r.partitions)
                .zip(&r.anonymous)
                .map(|((node, p), &anonymous)| ChainStepJson {
                    levels: node.levels().to_vec(),
                    n_classes: p.len(),
                    anonymous,
                    classes: one_based(p),
                })
                .collect(),
            bars: r
                .bars
                .iter()
                .map(|b| ChainBarJson {
                    row: b.row + 1,
                    birth: b.birth,
                    death: b.death,
                    weight_steps: b.weight_steps.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub levels: Vec<usize>,
    pub n_classes: usize,
    pub min_class_size: usize,
    pub anonymous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchReportJson {
    pub k: usize,
    pub strategy: Strategy,
    pub attributes: Vec<String>,
    pub minimal_nodes: Vec<Vec<usize>>,
    pub upper_chain_computed: bool,
    pub chains: Vec<ChainReportJson>,
    pub nodes: Vec<NodeJson>,
    pub note: Option<String>,
}

impl SearchReportJson {
    pub fn new(r: &SearchReport, attributes: Vec<String>) -> Self {
        Self {
            k: r.k,
            strategy: r.strategy,
            attributes,
            minimal_nodes: r
                .minimal_nodes
                .iter()
                .map(|n| n.levels().to_vec())
                .collect(),
            upper_chain_computed: r.upper_chain_computed,
            chains: r.chains.iter().map(ChainReportJson::new).collect(),
            nodes: r
                .evaluations
                .iter()
                .map(|e| NodeJson {
                    levels: e.node.levels().to_vec(),
                    n_classes: e.n_classes,
                    min_class_size: e.min_class_size,
                    anonymous: e.anonymous,
                })
                .collect(),
            note: r.note.clone(),
        }
    }
}
