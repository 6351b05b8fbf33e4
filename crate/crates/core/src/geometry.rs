//! Points, tables, normalization into the unit hypercube, and the minimum
//! enclosing ball.
//!
//! The closed ε-balls around a finite point set share a common point exactly
//! when the smallest ball enclosing the set has radius at most ε, so every
//! Čech membership test in this crate reduces to [`min_enclosing_ball`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnRole {
    Identifier,
    QuasiIdentifier,
    Sensitive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub role: ColumnRole,
}

impl Column {
    pub fn new(name: impl Into<String>, role: ColumnRole) -> Self {
        Self {
            name: name.into(),
            role,
        }
    }
}

/// A table whose quasi-identifier cells are all finite reals.
///
/// Raw cells are kept verbatim so identifier and sensitive columns can be
/// passed through unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericTable {
    columns: Vec<Column>,
    cells: Vec<Vec<String>>,
    quasi_columns: Vec<usize>,
    quasi_values: Vec<Vec<f64>>,
}

impl NumericTable {
    /// Validates the shape and parses every quasi-identifier cell.
    ///
    /// Row numbers in errors are 1-based data rows (the header is not counted).
    pub fn new(columns: Vec<Column>, cells: Vec<Vec<String>>) -> Result<Self> {
        let quasi_columns: Vec<usize> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.role == ColumnRole::QuasiIdentifier)
            .map(|(i, _)| i)
            .collect();
        if quasi_columns.is_empty() {
            return Err(Error::NoQuasiIdentifiers);
        }
        if cells.is_empty() {
            return Err(Error::EmptyTable);
        }

        let mut quasi_values = Vec::with_capacity(cells.len());
        for (r, row) in cells.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(Error::RowWidth {
                    row: r + 1,
                    expected: columns.len(),
                    found: row.len(),
                });
            }
            let mut values = Vec::with_capacity(quasi_columns.len());
            for &c in &quasi_columns {
                let raw = row[c].trim();
                let parsed = raw.parse::<f64>().ok().filter(|v| v.is_finite());
                match parsed {
                    Some(v) => values.push(v),
                    None => {
                        return Err(Error::NonNumericCell {
                            row: r + 1,
                            column: columns[c].name.clone(),
                            value: row[c].clone(),
                        })
                    }
                }
            }
            quasi_values.push(values);
        }

        Ok(Self {
            columns,
            cells,
            quasi_columns,
            quasi_values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.cells.len()
    }

    /// Number of quasi-identifier columns.
    pub fn n_quasi(&self) -> usize {
        self.quasi_columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn cells(&self) -> &[Vec<String>] {
        &self.cells
    }

    pub fn quasi_names(&self) -> Vec<&str> {
        self.quasi_columns
            .iter()
            .map(|&c| self.columns[c].name.as_str())
            .collect()
    }

    /// Parsed quasi-identifier tuple of `row` (0-based).
    pub fn quasi_row(&self, row: usize) -> &[f64] {
        &self.quasi_values[row]
    }

    pub fn quasi_rows(&self) -> &[Vec<f64>] {
        &self.quasi_values
    }
}

/// Per-column min-max scale in original units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub min: f64,
    pub max: f64,
}

impl ColumnScale {
    pub fn normalize(&self, x: f64) -> f64 {
        let span = self.max - self.min;
        if span > 0.0 {
            (x - self.min) / span
        } else {
            0.0
        }
    }

    pub fn denormalize(&self, u: f64) -> f64 {
        self.min + u * (self.max - self.min)
    }
}

/// `N` rows as points of the unit hypercube `[0, 1]^d`.
///
/// Point `i` corresponds to table row `i` (0-based); reports print it as row
/// id `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDataset {
    points: Vec<Vec<f64>>,
    scales: Vec<ColumnScale>,
}

impl NormalizedDataset {
    /// Min-max normalizes raw points column by column.
    pub fn from_raw(raw: &[Vec<f64>]) -> Result<Self> {
        let dim = check_dims(raw)?;
        let scales: Vec<ColumnScale> = (0..dim)
            .map(|j| {
                let (min, max) = raw
                    .iter()
                    .map(|p| p[j])
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v), hi.max(v))
                    });
                ColumnScale { min, max }
            })
            .collect();
        let points = raw
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&scales)
                    .map(|(&x, s)| s.normalize(x))
                    .collect()
            })
            .collect();
        Ok(Self { points, scales })
    }

    /// Wraps points that already live in the unit cube, with identity scales.
    pub fn from_unit_points(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = check_dims(&points)?;
        if let Some(bad) = points.iter().flatten().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutsideUnitCube(*bad));
        }
        Ok(Self {
            points,
            scales: vec![ColumnScale { min: 0.0, max: 1.0 }; dim],
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.scales.len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn scales(&self) -> &[ColumnScale] {
        &self.scales
    }

    /// 1-based row ids, in point order.
    pub fn row_ids(&self) -> impl Iterator<Item = usize> {
        1..=self.points.len()
    }

    pub fn denormalize(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .zip(&self.scales)
            .map(|(&u, s)| s.denormalize(u))
            .collect()
    }

    /// Borrowed views of the points at `indices`.
    pub fn select(&self, indices: &[usize]) -> Result<Vec<&[f64]>> {
        indices
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .map(Vec::as_slice)
                    .ok_or(Error::UnknownRow {
                        index: i,
                        n: self.points.len(),
                    })
            })
            .collect()
    }

    /// Minimum enclosing ball radius of the points at `indices`.
    pub fn radius_of(&self, indices: &[usize]) -> Result<f64> {
        Ok(min_enclosing_ball(&self.select(indices)?)?.radius)
    }
}

fn check_dims<P: AsRef<[f64]>>(points: &[P]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyTable)?.as_ref().len();
    if first == 0 {
        return Err(Error::NoQuasiIdentifiers);
    }
    for p in points {
        if p.as_ref().len() != first {
            return Err(Error::DimensionMismatch {
                expected: first,
                found: p.as_ref().len(),
            });
        }
    }
    Ok(first)
}

/// Min-max scales every quasi-identifier column into `[0, 1]`.
///
/// Constant columns map to 0.
pub fn normalize_dataset(table: &NumericTable) -> NormalizedDataset {
    NormalizedDataset::from_raw(table.quasi_rows()).expect("table invariants hold")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, p: &[f64], tolerance: f64) -> bool {
        distance(&self.center, p) <= self.radius + tolerance
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Radius of the smallest ball around two points: half their distance.
///
/// Edge births everywhere in the crate go through this function so that the
/// union-find sweep and the filtration agree bit for bit.
pub fn pair_radius(a: &[f64], b: &[f64]) -> f64 {
    0.5 * distance(a, b)
}

/// Smallest closed ball containing every point.
///
/// Move-to-front Welzl recursion with an incrementally orthogonalized support
/// set, valid in any dimension. The returned radius is the largest distance
/// from the computed center, so containment holds without slack.
pub fn min_enclosing_ball<P: AsRef<[f64]>>(points: &[P]) -> Result<Ball> {
    let dim = match points.first() {
        None => return Err(Error::EmptyPointSet),
        Some(p) => p.as_ref().len(),
    };
    for p in points {
        if p.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.as_ref().len(),
            });
        }
    }

    match points {
        [p] => {
            return Ok(Ball {
                center: p.as_ref().to_vec(),
                radius: 0.0,
            })
        }
        [a, b] => {
            let (a, b) = (a.as_ref(), b.as_ref());
            return Ok(Ball {
                center: a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect(),
                radius: pair_radius(a, b),
            });
        }
        _ => {}
    }

    let pts: Vec<&[f64]> = points.iter().map(AsRef::as_ref).collect();
    let mut support = SupportBall::new(dim);
    let mut order: Vec<usize> = (0..pts.len()).collect();
    support.move_to_front(&pts, &mut order, pts.len());

    let center = support.current_center;
    let radius = pts
        .iter()
        .map(|p| distance(&center, p))
        .fold(0.0_f64, f64::max);
    Ok(snap_to_diameter(&pts, center, radius))
}

// Relative gap under which a ball counts as spanned by one pair of points.
const DIAMETRAL: f64 = 1e-12;

/// Replaces a ball that is, up to rounding, the diametral ball of two
/// boundary points by that exact diametral ball, so that its radius equals
/// the pair's `pair_radius` bit for bit.
fn snap_to_diameter(pts: &[&[f64]], center: Vec<f64>, radius: f64) -> Ball {
    let boundary: Vec<&[f64]> = pts
        .iter()
        .filter(|p| distance(&center, p) >= radius * (1.0 - 1e-9))
        .copied()
        .collect();
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..boundary.len() {
        for j in (i + 1)..boundary.len() {
            let r = pair_radius(boundary[i], boundary[j]);
            if r >= radius * (1.0 - DIAMETRAL) && best.is_none_or(|(b, _, _)| r > b) {
                best = Some((r, i, j));
            }
        }
    }
    match best {
        Some((r, i, j)) => Ball {
            center: boundary[i]
                .iter()
                .zip(boundary[j])
                .map(|(x, y)| 0.5 * (x + y))
                .collect(),
            radius: r,
        },
        None => Ball { center, radius },
    }
}

/// True iff the closed `eps`-balls around `points` have a common point.
pub fn balls_intersect<P: AsRef<[f64]>>(points: &[P], eps: f64) -> Result<bool> {
    check_eps(eps)?;
    Ok(min_enclosing_ball(points)?.radius <= eps)
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

// Squared-length ratio below which a new support point counts as affinely
// dependent on the current support.
const DEGENERACY: f64 = 1e-24;

/// Ball through a growing set of boundary points with center in their affine
/// hull.
struct SupportBall {
    dim: usize,
    size: usize,
    origin: Vec<f64>,
    // Orthogonalized offsets of the support points from `origin`.
    offsets: Vec<Vec<f64>>,
    // Twice the squared norm of each offset.
    norms: Vec<f64>,
    centers: Vec<Vec<f64>>,
    squared_radii: Vec<f64>,
    current_center: Vec<f64>,
    current_squared_radius: f64,
}

impl SupportBall {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            size: 0,
            origin: vec![0.0; dim],
            offsets: vec![vec![0.0; dim]; dim + 1],
            norms: vec![0.0; dim + 1],
            centers: vec![vec![0.0; dim]; dim + 1],
            squared_radii: vec![0.0; dim + 1],
            current_center: vec![0.0; dim],
            current_squared_radius: -1.0,
        }
    }

    fn excess(&self, p: &[f64]) -> f64 {
        squared_distance(p, &self.current_center) - self.current_squared_radius
    }

    fn push(&mut self, p: &[f64]) -> bool {
        let m = self.size;
        if m == 0 {
            self.origin.copy_from_slice(p);
            self.centers[0].copy_from_slice(p);
            self.squared_radii[0] = 0.0;
        } else {
            let mut offset: Vec<f64> = p.iter().zip(&self.origin).map(|(x, o)| x - o).collect();
            let coefficients: Vec<f64> = (1..m)
                .map(|i| 2.0 * dot(&self.offsets[i], &offset) / self.norms[i])
                .collect();
            for (i, coef) in (1..m).zip(coefficients) {
                for (o, v) in offset.iter_mut().zip(&self.offsets[i]) {
                    *o -= coef * v;
                }
            }
            let norm = 2.0 * dot(&offset, &offset);
            if norm == 0.0 || norm < DEGENERACY * self.current_squared_radius {
                return false;
            }
            let e = squared_distance(p, &self.centers[m - 1]) - self.squared_radii[m - 1];
            let f = e / norm;
            let next: Vec<f64> = self.centers[m - 1]
                .iter()
                .zip(&offset)
                .map(|(c, v)| c + f * v)
                .collect();
            self.centers[m] = next;
            self.squared_radii[m] = self.squared_radii[m - 1] + e * f / 2.0;
            self.offsets[m] = offset;
            self.norms[m] = norm;
        }
        self.current_center.clone_from(&self.centers[m]);
        self.current_squared_radius = self.squared_radii[m];
        self.size += 1;
        true
    }

    fn pop(&mut self) {
        self.size -= 1;
    }

    fn move_to_front(&mut self, pts: &[&[f64]], order: &mut [usize], end: usize) {
        if self.size == self.dim + 1 {
            return;
        }
        for i in 0..end {
            let p = pts[order[i]];
            if self.excess(p) > 0.0 && self.push(p) {
                self.move_to_front(pts, order, i);
                self.pop();
                order[..=i].rotate_right(1);
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
