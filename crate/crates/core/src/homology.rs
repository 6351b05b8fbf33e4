//! Persistence over the two-element field: boundary matrices, the standard
//! column reduction, barcodes, and the weighted `H0` diagram whose bars carry
//! the size of their connected component.

use std::collections::HashMap;

use crate::complex::{Filtration, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geometry::{pair_radius, NormalizedDataset};
use crate::gf2::BitMatrix;
use crate::union_find::DisjointSets;

/// Sparse boundary matrix in filtration order. Column `i` holds the sorted
/// positions of the facets of entry `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrix {
    columns: Vec<Vec<usize>>,
    dims: Vec<usize>,
}

impl BoundaryMatrix {
    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

pub fn boundary_matrix(filt: &Filtration) -> Result<BoundaryMatrix> {
    let mut position: HashMap<&Simplex, usize> = HashMap::with_capacity(filt.len());
    let mut columns = Vec::with_capacity(filt.len());
    let mut dims = Vec::with_capacity(filt.len());
    for (i, entry) in filt.entries().iter().enumerate() {
        let mut col = Vec::new();
        for face in entry.simplex.facets() {
            match position.get(&face) {
                Some(&p) => col.push(p),
                None => {
                    return Err(Error::MissingFace {
                        entry: i,
                        face: face.vertices().to_vec(),
                    })
                }
            }
        }
        col.sort_unstable();
        columns.push(col);
        dims.push(entry.simplex.dim());
        position.insert(&entry.simplex, i);
    }
    Ok(BoundaryMatrix { columns, dims })
}

/// Result of reducing a boundary matrix: `(birth, death)` index pairs and the
/// indices that never get paired.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PersistencePairs {
    pub pairs: Vec<(usize, usize)>,
    pub unpaired: Vec<usize>,
}

/// Left-to-right column reduction: each column absorbs earlier reduced columns
/// sharing its lowest index until that index is unclaimed or it empties.
pub fn reduce(bm: &BoundaryMatrix) -> PersistencePairs {
    let n = bm.columns.len();
    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut owner_of_low: Vec<Option<usize>> = vec![None; n];
    let mut pairs = Vec::new();
    let mut paired = vec![false; n];

    for j in 0..n {
        let mut col = bm.columns[j].clone();
        while let Some(&low) = col.last() {
            match owner_of_low[low] {
                Some(other) => col = symmetric_difference(&col, &reduced[other]),
                None => {
                    owner_of_low[low] = Some(j);
                    pairs.push((low, j));
                    paired[low] = true;
                    paired[j] = true;
                    break;
                }
            }
        }
        reduced.push(col);
    }

    pairs.sort_unstable();
    let unpaired = (0..n).filter(|&i| !paired[i]).collect();
    PersistencePairs { pairs, unpaired }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

const ZERO_LENGTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bar {
    pub dim: usize,
    pub birth: f64,
    /// `None` for a class that never dies.
    pub death: Option<f64>,
}

impl Bar {
    /// Death equals birth, up to the rounding of two ball computations that
    /// agree in exact arithmetic.
    pub fn is_zero_length(&self) -> bool {
        self.death
            .is_some_and(|d| d - self.birth <= ZERO_LENGTH * self.birth.max(1.0))
    }

    /// Alive on the half-open interval `[birth, death)`.
    pub fn is_live_at(&self, eps: f64) -> bool {
        self.birth <= eps && self.death.is_none_or(|d| eps < d)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Barcode {
    pub bars: Vec<Bar>,
}

impl Barcode {
    /// Bars with positive length, for rendering.
    pub fn displayed(&self) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(|b| !b.is_zero_length())
    }

    pub fn of_dim(&self, dim: usize) -> impl Iterator<Item = &Bar> {
        self.bars.iter().filter(move |b| b.dim == dim)
    }

    pub fn max_dim(&self) -> usize {
        self.bars.iter().map(|b| b.dim).max().unwrap_or(0)
    }

    /// Betti numbers `0..=max_dim` of the sublevel complex at `eps`.
    pub fn betti_at(&self, eps: f64) -> Vec<usize> {
        let mut out = vec![0; self.max_dim() + 1];
        for b in self.bars.iter().filter(|b| b.is_live_at(eps)) {
            out[b.dim] += 1;
        }
        out
    }
}

/// Reads bar endpoints off the entry births of `filt`.
///
/// Zero-length bars are kept; [`Barcode::displayed`] hides them.
pub fn barcode(pairs: &PersistencePairs, filt: &Filtration) -> Barcode {
    let entries = filt.entries();
    let mut bars: Vec<(usize, Bar)> = pairs
        .pairs
        .iter()
        .map(|&(b, d)| {
            (
                b,
                Bar {
                    dim: entries[b].simplex.dim(),
                    birth: entries[b].birth,
                    death: Some(entries[d].birth),
                },
            )
        })
        .chain(pairs.unpaired.iter().map(|&b| {
            (
                b,
                Bar {
                    dim: entries[b].simplex.dim(),
                    birth: entries[b].birth,
                    death: None,
                },
            )
        }))
        .collect();
    bars.sort_by(|(ia, a), (ib, b)| a.dim.cmp(&b.dim).then(ia.cmp(ib)));
    Barcode {
        bars: bars.into_iter().map(|(_, b)| b).collect(),
    }
}

/// Boundary matrix, reduction and barcode in one call.
///
/// Bars in the top dimension of a truncated filtration may be missing their
/// deaths; only dimensions below `dim_cap` are complete.
pub fn persistence(filt: &Filtration) -> Result<Barcode> {
    let bm = boundary_matrix(filt)?;
    Ok(barcode(&reduce(&bm), filt))
}

/// Betti numbers `dim H_n` for `n = 0..dim_cap` (exclusive) of a complex,
/// by rank-nullity over the two-element field.
pub fn homology_dims_at(complex: &SimplicialComplex) -> Vec<usize> {
    let cap = complex.dim_cap();
    let by_dim: Vec<Vec<&Simplex>> = (0..=cap).map(|d| complex.of_dim(d)).collect();
    // ranks[n] = rank of the boundary map out of n-chains.
    let mut ranks = vec![0usize; cap + 2];
    for n in 1..=cap {
        ranks[n] = boundary_rank(&by_dim[n - 1], &by_dim[n]);
    }
    (0..cap)
        .map(|n| by_dim[n].len() - ranks[n] - ranks[n + 1])
        .collect()
}

fn boundary_rank(faces: &[&Simplex], cofaces: &[&Simplex]) -> usize {
    if faces.is_empty() || cofaces.is_empty() {
        return 0;
    }
    let index: HashMap<&Simplex, usize> = faces.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut m = BitMatrix::zeros(cofaces.len(), faces.len());
    for (r, s) in cofaces.iter().enumerate() {
        for f in s.facets() {
            m.set(r, index[&f]);
        }
    }
    m.rank()
}

/// An `H0` bar carrying the size of its component as a step function.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBar {
    /// Oldest vertex of the component this bar tracks.
    pub vertex: usize,
    pub birth: f64,
    pub death: Option<f64>,
    /// `(eps, weight)`: the weight from `eps` on, until the next step.
    pub weight_steps: Vec<(f64, usize)>,
}

impl WeightedBar {
    pub fn is_live_at(&self, eps: f64) -> bool {
        self.birth <= eps && self.death.is_none_or(|d| eps < d)
    }

    pub fn weight_at(&self, eps: f64) -> usize {
        self.weight_steps
            .iter()
            .take_while(|(e, _)| *e <= eps)
            .last()
            .map_or(0, |&(_, w)| w)
    }
}

/// Component partition valid from `eps` until the next snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub eps: f64,
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedBarcode {
    pub n_points: usize,
    pub h0_bars: Vec<WeightedBar>,
    pub snapshots: Vec<Snapshot>,
}

impl WeightedBarcode {
    pub fn live_bars_at(&self, eps: f64) -> impl Iterator<Item = &WeightedBar> {
        self.h0_bars.iter().filter(move |b| b.is_live_at(eps))
    }

    pub fn partition_at(&self, eps: f64) -> &[Vec<usize>] {
        let i = self.snapshots.partition_point(|s| s.eps <= eps);
        &self.snapshots[i.saturating_sub(1)].components
    }

    /// Merge radii, increasing, excluding the initial snapshot at 0.
    pub fn critical_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.snapshots.iter().skip(1).map(|s| s.eps)
    }
}

/// Edges between all point pairs sorted by birth, then lexicographically,
/// matching filtration order.
pub(crate) fn sorted_edges(data: &NormalizedDataset) -> Vec<(f64, usize, usize)> {
    let n = data.len();
    let mut edges: Vec<(f64, usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| (pair_radius(data.point(i), data.point(j)), i, j))
        .collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    edges
}

/// Union-find sweep over edges by birth. At a merge the bar of the younger
/// component (larger oldest vertex) dies and the survivor absorbs its weight.
pub fn weighted_h0_barcode(data: &NormalizedDataset) -> WeightedBarcode {
    let n = data.len();
    let mut sets = DisjointSets::new(n);
    let mut oldest: Vec<usize> = (0..n).collect();
    let mut bars: Vec<WeightedBar> = (0..n)
        .map(|v| WeightedBar {
            vertex: v,
            birth: 0.0,
            death: None,
            weight_steps: vec![(0.0, 1)],
        })
        .collect();
    let mut snapshots = Vec::new();
    let mut live = n;

    let edges = sorted_edges(data);
    let mut i = 0;
    // Zero-radius edges (duplicate points) merge before the first snapshot.
    let mut eps = 0.0;
    loop {
        let mut merged = false;
        while i < edges.len() && edges[i].0 == eps {
            let (_, a, b) = edges[i];
            i += 1;
            let (ra, rb) = (sets.find(a), sets.find(b));
            if ra == rb {
                continue;
            }
            let (elder, younger) = if oldest[ra] < oldest[rb] {
                (oldest[ra], oldest[rb])
            } else {
                (oldest[rb], oldest[ra])
            };
            let root = sets.union(ra, rb).expect("distinct roots");
            oldest[root] = elder;
            bars[younger].death = Some(eps);
            let absorbed = bars[younger].weight_steps.last().map_or(0, |s| s.1);
            let total = bars[elder].weight_steps.last().map_or(0, |s| s.1) + absorbed;
            push_step(&mut bars[elder].weight_steps, eps, total);
            live -= 1;
            merged = true;
        }
        if merged || snapshots.is_empty() {
            snapshots.push(Snapshot {
                eps,
                components: sets.groups(),
            });
        }
        if live <= 1 || i >= edges.len() {
            break;
        }
        eps = edges[i].0;
    }

    WeightedBarcode {
        n_points: n,
        h0_bars: bars,
        snapshots,
    }
}

fn push_step(steps: &mut Vec<(f64, usize)>, eps: f64, weight: usize) {
    match steps.last_mut() {
        Some(last) if last.0 == eps => last.1 = weight,
        _ => steps.push((eps, weight)),
    }
}
