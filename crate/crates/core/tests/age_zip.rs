//! Frozen values for the nine-row Age/ZIP table, produced by the Python
//! oracle in `oracles/age_zip_oracle.py`, which shares no code with the crate.

use anonytope_core::anonymity::{
    check_k_anonymity, compute_regimes, generalize_table, minimal_epsilon, FailureReason, Objective,
};
use anonytope_core::complex::build_filtration;
use anonytope_core::homology::{persistence, weighted_h0_barcode};
use anonytope_core::{normalize_dataset, Column, ColumnRole, NormalizedDataset, NumericTable};

const TOL: f64 = 1e-9;

const ROWS: [(&str, &str, &str); 9] = [
    ("25", "47677", "$47,000"),
    ("22", "47602", "$32,000"),
    ("24", "47678", "$52,000"),
    ("43", "47905", "$151,000"),
    ("52", "47909", "$145,000"),
    ("38", "47906", "$98,000"),
    ("47", "47605", "$110,000"),
    ("36", "47673", "$92,000"),
    ("32", "47607", "$115,000"),
];

const POINTS: [[f64; 2]; 9] = [
    [0.1, 0.24429967426710097],
    [0.0, 0.0],
    [0.06666666666666667, 0.247557003257329],
    [0.7, 0.9869706840390879],
    [1.0, 1.0],
    [0.5333333333333333, 0.990228013029316],
    [0.8333333333333334, 0.009771986970684038],
    [0.4666666666666667, 0.23127035830618892],
    [0.3333333333333333, 0.016286644951140065],
];

const SQRT2_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `(lo, hi, classes)` for k = 1, 1-based rows; `hi = None` is infinity.
#[allow(clippy::type_complexity)]
const K1_REGIMES: [(f64, Option<f64>, &[&[usize]]); 6] = [
    (
        0.0,
        Some(0.01674605403715821),
        &[&[1], &[2], &[3], &[4], &[5], &[6], &[7], &[8], &[9]],
    ),
    (
        0.01674605403715821,
        Some(0.08334924710207098),
        &[&[1, 3], &[2], &[4], &[5], &[6], &[7], &[8], &[9]],
    ),
    (
        0.08334924710207098,
        Some(0.12648693093132546),
        &[&[1, 3], &[2], &[4, 6], &[5], &[7], &[8], &[9]],
    ),
    (
        0.12648693093132546,
        Some(0.12818825444067958),
        &[&[1, 3], &[2], &[4, 6], &[5], &[7], &[8, 9]],
    ),
    (
        0.13198705509159947,
        Some(0.15014140257970926),
        &[&[1, 2, 3], &[4, 6], &[5], &[7], &[8, 9]],
    ),
    (SQRT2_HALF, None, &[&[1, 2, 3, 4, 5, 6, 7, 8, 9]]),
];

const H1_BARS: [(f64, f64); 3] = [
    (0.16686548917831662, 0.1800699032457087),
    (0.1834490443684933, 0.18792640630783736),
    (0.5020780057834053, 0.50307996926048),
];

const H0_DEATHS: [f64; 8] = [
    0.016746054037158207,
    0.08334924710207092,
    0.12648693093132546,
    0.12818825444067958,
    0.15014140257970926,
    0.16312141642215905,
    0.21418798574425554,
    0.38094001040428715,
];

fn table() -> NumericTable {
    let columns = vec![
        Column::new("Age", ColumnRole::QuasiIdentifier),
        Column::new("ZIP", ColumnRole::QuasiIdentifier),
        Column::new("Salary", ColumnRole::Sensitive),
    ];
    let cells = ROWS
        .iter()
        .map(|(a, z, s)| vec![a.to_string(), z.to_string(), s.to_string()])
        .collect();
    NumericTable::new(columns, cells).unwrap()
}

fn data() -> NormalizedDataset {
    normalize_dataset(&table())
}

fn zero_based(classes: &[&[usize]]) -> Vec<Vec<usize>> {
    classes
        .iter()
        .map(|c| c.iter().map(|r| r - 1).collect())
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

#[test]
fn normalized_points() {
    let d = data();
    for (i, expected) in POINTS.iter().enumerate() {
        for (a, b) in d.point(i).iter().zip(expected) {
            assert!(close(*a, *b), "row {}", i + 1);
        }
    }
    assert_eq!(d.point(1), &[0.0, 0.0]);
    assert_eq!(d.point(4), &[1.0, 1.0]);
}

#[test]
fn regimes_for_k_one() {
    let regimes = compute_regimes(&data(), 1).unwrap();
    assert_eq!(regimes.len(), K1_REGIMES.len());
    for (r, (lo, hi, classes)) in regimes.iter().zip(K1_REGIMES) {
        assert!(close(r.lo, lo), "{} vs {lo}", r.lo);
        match (r.hi, hi) {
            (Some(a), Some(b)) => assert!(close(a, b)),
            (None, None) => {}
            other => panic!("upper ends differ: {other:?}"),
        }
        assert_eq!(r.classes, zero_based(classes));
        assert_eq!(r.n_classes, classes.len());
    }
}

#[test]
fn regimes_for_k_above_one_collapse_to_the_whole_set() {
    let d = data();
    for k in 2..=9 {
        let regimes = compute_regimes(&d, k).unwrap();
        assert_eq!(regimes.len(), 1, "k = {k}");
        assert!(close(regimes[0].lo, SQRT2_HALF));
        assert_eq!(regimes[0].hi, None);
        assert_eq!(regimes[0].classes, vec![(0..9).collect::<Vec<_>>()]);
    }
    assert!(compute_regimes(&d, 10).unwrap().is_empty());
    let (eps, _) = minimal_epsilon(&d, 2, Objective::SmallestEps).unwrap();
    assert!(close(eps, SQRT2_HALF));
}

#[test]
fn two_class_partition_is_a_component_snapshot() {
    let wb = weighted_h0_barcode(&data());
    let snap = wb
        .snapshots
        .iter()
        .position(|s| s.components == zero_based(&[&[1, 2, 3, 7, 8, 9], &[4, 5, 6]]))
        .expect("snapshot present");
    assert!(close(wb.snapshots[snap].eps, 0.21418798574425554));
    assert!(close(wb.snapshots[snap + 1].eps, 0.38094001040428715));
    let weights: Vec<usize> = wb.live_bars_at(0.3).map(|b| b.weight_at(0.3)).collect();
    assert_eq!(weights, vec![6, 3]);
}

#[test]
fn the_six_row_class_does_not_fit_one_ball_at_point_three() {
    let d = data();
    let v = check_k_anonymity(&d, 0.3, 3).unwrap();
    assert!(!v.achieved);
    assert_eq!(
        v.failure,
        Some(FailureReason::ComponentNotSimplex(vec![0, 1, 2, 6, 7, 8]))
    );
    assert!(d.radius_of(&[0, 1, 2, 6, 7, 8]).unwrap() > 0.4);

    let v4 = check_k_anonymity(&d, 0.3, 4).unwrap();
    assert!(!v4.achieved);
    assert!(v4.components.contains(&vec![3, 4, 5]));
}

#[test]
fn barcode_bars() {
    let bc = persistence(&build_filtration(&data(), 2).unwrap()).unwrap();
    let h1: Vec<_> = bc.displayed().filter(|b| b.dim == 1).collect();
    assert_eq!(h1.len(), H1_BARS.len(), "{h1:?}");
    for (bar, (b, d)) in h1.iter().zip(H1_BARS) {
        assert!(close(bar.birth, b) && close(bar.death.unwrap(), d));
    }
    let mut deaths: Vec<f64> = bc.of_dim(0).filter_map(|b| b.death).collect();
    deaths.sort_by(f64::total_cmp);
    assert_eq!(deaths.len(), H0_DEATHS.len());
    for (a, b) in deaths.iter().zip(H0_DEATHS) {
        assert!(close(*a, b));
    }
}

#[test]
fn three_class_generalization_intervals() {
    let classes = zero_based(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
    let g = generalize_table(&table(), &classes, false).unwrap();
    let (_, rows) = g.to_records();
    let intervals: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r[0].as_str(), r[1].as_str()))
        .collect();
    let expected = [
        ("[22-25]", "[47602-47678]"),
        ("[38-52]", "[47905-47909]"),
        ("[32-47]", "[47605-47673]"),
    ];
    for (i, pair) in intervals.iter().enumerate() {
        assert_eq!(*pair, expected[i / 3]);
    }
}
