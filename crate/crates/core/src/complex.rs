//! Anonymity (Čech) complexes at a fixed radius and the exact radius
//! filtration.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{check_eps, min_enclosing_ball, pair_radius, NormalizedDataset};

/// Default cap on the number of simplices a filtration may hold.
pub const DEFAULT_SIMPLEX_BUDGET: u128 = 5_000_000;

/// A simplex on 0-based point indices, vertices strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() || vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSimplex(vertices));
        }
        Ok(Self(vertices))
    }

    pub fn vertex(v: usize) -> Self {
        Self(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-1 faces, in lexicographic order. Empty for a vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        let mut out: Vec<Simplex> = (0..self.0.len())
            .map(|skip| {
                Simplex(
                    self.0
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != skip)
                        .map(|(_, &v)| v)
                        .collect(),
                )
            })
            .collect();
        out.sort();
        out
    }
}

/// A finite simplicial complex truncated at `dim_cap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    simplices: BTreeSet<Simplex>,
    dim_cap: usize,
}

impl SimplicialComplex {
    pub fn new(simplices: impl IntoIterator<Item = Simplex>, dim_cap: usize) -> Self {
        Self {
            simplices: simplices
                .into_iter()
                .filter(|s| s.dim() <= dim_cap)
                .collect(),
            dim_cap,
        }
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    /// Simplices of dimension `dim`, lexicographically sorted.
    pub fn of_dim(&self, dim: usize) -> Vec<&Simplex> {
        self.simplices.iter().filter(|s| s.dim() == dim).collect()
    }

    pub fn count_of_dim(&self, dim: usize) -> usize {
        self.simplices.iter().filter(|s| s.dim() == dim).count()
    }

    pub fn is_downward_closed(&self) -> bool {
        self.simplices
            .iter()
            .all(|s| s.facets().iter().all(|f| self.simplices.contains(f)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationEntry {
    pub simplex: Simplex,
    pub birth: f64,
}

/// Simplices ordered by `(birth, dim, vertices)`; every face precedes its
/// cofaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    entries: Vec<FiltrationEntry>,
    dim_cap: usize,
}

fn entry_order(a: &FiltrationEntry, b: &FiltrationEntry) -> std::cmp::Ordering {
    a.birth
        .total_cmp(&b.birth)
        .then(a.simplex.dim().cmp(&b.simplex.dim()))
        .then_with(|| a.simplex.cmp(&b.simplex))
}

impl Filtration {
    /// Sorts `entries` and checks that every face is present with a birth no
    /// later than its coface.
    pub fn new(mut entries: Vec<FiltrationEntry>, dim_cap: usize) -> Result<Self> {
        entries.sort_by(entry_order);
        let filt = Self { entries, dim_cap };
        filt.validate()?;
        Ok(filt)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let mut position: HashMap<&Simplex, usize> = HashMap::with_capacity(self.entries.len());
        for (i, e) in self.entries.iter().enumerate() {
            if !(e.birth.is_finite() && e.birth >= 0.0) {
                return Err(Error::InvalidEpsilon(e.birth));
            }
            if i > 0 && entry_order(&self.entries[i - 1], e) != std::cmp::Ordering::Less {
                return Err(Error::UnsortedFiltration(i));
            }
            for face in e.simplex.facets() {
                if !position.contains_key(&face) {
                    return Err(Error::MissingFace {
                        entry: i,
                        face: face.0,
                    });
                }
            }
            position.insert(&e.simplex, i);
        }
        Ok(())
    }

    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    /// The complex of all simplices born at or before `eps`.
    pub fn sublevel(&self, eps: f64) -> SimplicialComplex {
        SimplicialComplex::new(
            self.entries
                .iter()
                .take_while(|e| e.birth <= eps)
                .map(|e| e.simplex.clone()),
            self.dim_cap,
        )
    }

    /// Distinct birth values, increasing.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for e in &self.entries {
            if out.last() != Some(&e.birth) {
                out.push(e.birth);
            }
        }
        out
    }

    /// Line format: a `# dim_cap <n>` header, then `birth v0 v1 ... vk` per
    /// simplex in filtration order. Births use the shortest decimal that
    /// parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# dim_cap {}", self.dim_cap).unwrap();
        for e in &self.entries {
            write!(out, "{}", e.birth).unwrap();
            for v in e.simplex.vertices() {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut dim_cap = None;
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(cap) = rest.trim().strip_prefix("dim_cap") {
                    let cap = cap
                        .trim()
                        .parse::<usize>()
                        .map_err(|e| Error::FiltrationParse {
                            line: line_no,
                            reason: e.to_string(),
                        })?;
                    dim_cap = Some(cap);
                }
                continue;
            }
            let mut fields = line.split_whitespace();
            let birth = fields
                .next()
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| Error::FiltrationParse {
                    line: line_no,
                    reason: "missing or malformed birth".into(),
                })?;
            let vertices = fields
                .map(|f| f.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::FiltrationParse {
                    line: line_no,
                    reason: e.to_string(),
                })?;
            let simplex = Simplex::new(vertices).map_err(|e| Error::FiltrationParse {
                line: line_no,
                reason: e.to_string(),
            })?;
            entries.push(FiltrationEntry { simplex, birth });
        }
        let dim_cap = dim_cap.unwrap_or_else(|| {
            entries
                .iter()
                .map(|e: &FiltrationEntry| e.simplex.dim())
                .max()
                .unwrap_or(0)
                .max(1)
        });
        let filt = Self { entries, dim_cap };
        filt.validate()?;
        Ok(filt)
    }
}

/// The anonymity complex at radius `eps`, truncated at `dim_cap`.
///
/// Built dimension by dimension: a candidate `(j+1)`-simplex is tested only
/// when all its facets are present, so the result is downward closed even
/// under floating-point ties.
pub fn build_anonymity_complex(
    data: &NormalizedDataset,
    eps: f64,
    dim_cap: usize,
) -> Result<SimplicialComplex> {
    check_eps(eps)?;
    if dim_cap < 1 {
        return Err(Error::InvalidDimCap);
    }
    let n = data.len();
    let mut all: Vec<Simplex> = (0..n).map(Simplex::vertex).collect();

    let mut level: Vec<Simplex> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| pair_radius(data.point(i), data.point(j)) <= eps)
        .map(|(i, j)| Simplex(vec![i, j]))
        .collect();

    for _ in 2..=dim_cap {
        if level.is_empty() {
            break;
        }
        let present: HashSet<&Simplex> = level.iter().collect();
        let next: Vec<Simplex> = level
            .par_iter()
            .flat_map_iter(|s| {
                let last = *s.0.last().unwrap();
                ((last + 1)..n).map(move |v| {
                    let mut vs = s.0.clone();
                    vs.push(v);
                    Simplex(vs)
                })
            })
            .filter(|t| t.facets().iter().all(|f| present.contains(f)))
            .filter(|t| {
                let pts = data.select(&t.0).expect("indices in range");
                min_enclosing_ball(&pts).expect("nonempty").radius <= eps
            })
            .collect();
        all.append(&mut level);
        level = next;
    }
    all.append(&mut level);
    Ok(SimplicialComplex::new(all, dim_cap))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of simplices of dimension at most `dim_cap` on `n` vertices.
pub fn full_simplex_count(n: usize, dim_cap: usize) -> u128 {
    (1..=(dim_cap as u128 + 1))
        .map(|j| binomial(n as u128, j))
        .fold(0u128, u128::saturating_add)
}

pub fn build_filtration(data: &NormalizedDataset, dim_cap: usize) -> Result<Filtration> {
    build_filtration_with_budget(data, dim_cap, DEFAULT_SIMPLEX_BUDGET)
}

/// Every simplex of dimension at most `dim_cap`, born at the radius of its
/// minimum enclosing ball.
///
/// A birth is raised to the latest birth among its facets when rounding puts
/// it below one, which keeps faces ahead of cofaces.
pub fn build_filtration_with_budget(
    data: &NormalizedDataset,
    dim_cap: usize,
    budget: u128,
) -> Result<Filtration> {
    if dim_cap < 1 {
        return Err(Error::InvalidDimCap);
    }
    let n = data.len();
    let total = full_simplex_count(n, dim_cap);
    if total > budget {
        return Err(Error::FiltrationTooLarge {
            simplices: total,
            budget,
        });
    }

    let mut entries: Vec<FiltrationEntry> = (0..n)
        .map(|v| FiltrationEntry {
            simplex: Simplex::vertex(v),
            birth: 0.0,
        })
        .collect();

    let mut previous: HashMap<Simplex, f64> = entries
        .iter()
        .map(|e| (e.simplex.clone(), e.birth))
        .collect();

    for size in 2..=(dim_cap + 1).min(n) {
        let level: Vec<(Simplex, f64)> = combinations(n, size)
            .into_par_iter()
            .map(|vs| {
                let s = Simplex(vs);
                let pts = data.select(&s.0).expect("indices in range");
                let radius = min_enclosing_ball(&pts).expect("nonempty").radius;
                let floor = s
                    .facets()
                    .iter()
                    .map(|f| previous[f])
                    .fold(0.0_f64, f64::max);
                let birth = radius.max(floor);
                (s, birth)
            })
            .collect();
        entries.extend(level.iter().map(|(s, b)| FiltrationEntry {
            simplex: s.clone(),
            birth: *b,
        }));
        previous = level.into_iter().collect();
    }

    entries.par_sort_by(entry_order);
    Ok(Filtration { entries, dim_cap })
}

/// All `size`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size == 0 || size > n {
        return out;
    }
    let mut current: Vec<usize> = (0..size).collect();
    loop {
        out.push(current.clone());
        let mut i = size;
        while i > 0 && current[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        current[i - 1] += 1;
        for j in i..size {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// True iff `subset` holds at least `k` rows whose `eps`-balls share a point.
pub fn is_anonymity_simplex(
    data: &NormalizedDataset,
    subset: &[usize],
    eps: f64,
    k: usize,
) -> Result<bool> {
    check_eps(eps)?;
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let mut rows = subset.to_vec();
    rows.sort_unstable();
    rows.dedup();
    if rows.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let pts = data.select(&rows)?;
    Ok(rows.len() >= k && min_enclosing_ball(&pts)?.radius <= eps)
}
