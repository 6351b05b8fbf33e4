#![allow(dead_code)]

use anonytope_core::NormalizedDataset;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
        .collect()
}

/// Points snapped to a coarse lattice, so ties and duplicates occur.
pub fn snapped_points(rng: &mut ChaCha8Rng, n: usize, d: usize, steps: u32) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            (0..d)
                .map(|_| f64::from(rng.random_range(0..=steps)) / f64::from(steps))
                .collect()
        })
        .collect()
}

pub fn dataset(points: Vec<Vec<f64>>) -> NormalizedDataset {
    NormalizedDataset::from_unit_points(points).unwrap()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[allow(clippy::needless_range_loop)]
/// Smallest ball through a support set inside its affine hull, or `None`
/// for affinely dependent sets.
pub fn circumball(support: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = support[0];
    let m = support.len() - 1;
    if m == 0 {
        return Some((p0.to_vec(), 0.0));
    }
    let diffs: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row: Vec<f64> = (0..m).map(|j| 2.0 * dot(&diffs[i], &diffs[j])).collect();
            row.push(dot(&diffs[i], &diffs[i]));
            row
        })
        .collect();
    let scale = a.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale.max(1e-300) {
            return None;
        }
        a.swap(col, pivot);
        for r in 0..m {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let lambda: Vec<f64> = (0..m).map(|i| a[i][m] / a[i][i]).collect();
    let center: Vec<f64> = (0..p0.len())
        .map(|k| p0[k] + (0..m).map(|i| lambda[i] * diffs[i][k]).sum::<f64>())
        .collect();
    let r = dist(&center, p0);
    Some((center, r))
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

/// Minimum enclosing ball radius by trying every support set of at most
/// `d + 1` points.
pub fn brute_force_meb(points: &[Vec<f64>]) -> f64 {
    let d = points[0].len();
    let mut best = f64::INFINITY;
    for size in 1..=(d + 1).min(points.len()) {
        for sub in subsets(points.len(), size) {
            let support: Vec<&[f64]> = sub.iter().map(|&i| points[i].as_slice()).collect();
            let Some((c, r)) = circumball(&support) else {
                continue;
            };
            if r < best
                && points
                    .iter()
                    .all(|p| dist(&c, p) <= r * (1.0 + 1e-10) + 1e-12)
            {
                best = r;
            }
        }
    }
    best
}

/// All set partitions of `0..n`.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, n, blocks, out);
        blocks.pop();
    }
    rec(0, n, &mut blocks, &mut out);
    out
}
