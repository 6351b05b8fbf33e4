mod common;

use anonytope_core::categorical::{
    build_lattice, chain_sweep, generalize_value, generalized_partition_at, lattice_search,
    lower_chain, upper_chain, GeneralizationTree, LatticeNode, Strategy,
};
use common::rng;
use rand::RngExt;

fn gender() -> GeneralizationTree {
    GeneralizationTree::from_pairs("gender", "Person", &[("Person", &["M", "F"])]).unwrap()
}

fn country() -> GeneralizationTree {
    GeneralizationTree::from_pairs(
        "country",
        "World",
        &[
            ("World", &["Europe", "America"]),
            ("Europe", &["West Europe", "East Europe"]),
            ("America", &["North America", "South America"]),
            ("West Europe", &["Portugal", "Spain"]),
            ("East Europe", &["Hungary", "Poland"]),
            ("North America", &["USA", "Canada"]),
            ("South America", &["Brazil", "Argentina"]),
        ],
    )
    .unwrap()
}

fn age() -> GeneralizationTree {
    GeneralizationTree::from_pairs(
        "age",
        "any",
        &[
            ("any", &["young", "old"]),
            ("young", &["20s", "30s"]),
            ("old", &["40s", "50s"]),
        ],
    )
    .unwrap()
}

fn random_rows(
    r: &mut rand_chacha::ChaCha8Rng,
    trees: &[GeneralizationTree],
    n: usize,
) -> Vec<Vec<String>> {
    let leaves: Vec<Vec<String>> = trees
        .iter()
        .map(|t| t.leaves().map(str::to_string).collect())
        .collect();
    (0..n)
        .map(|_| {
            leaves
                .iter()
                .map(|l| l[r.random_range(0..l.len())].clone())
                .collect()
        })
        .collect()
}

/// Direct check of the plain definition at one node: every generalized
/// tuple occurs at least `k` times.
fn node_is_anonymous(
    rows: &[Vec<String>],
    trees: &[GeneralizationTree],
    node: &LatticeNode,
    k: usize,
) -> bool {
    let tuples: Vec<Vec<&str>> = rows
        .iter()
        .map(|row| {
            row.iter()
                .zip(trees)
                .zip(node.levels())
                .map(|((v, t), &s)| generalize_value(t, v, s).unwrap())
                .collect()
        })
        .collect();
    tuples
        .iter()
        .all(|t| tuples.iter().filter(|u| *u == t).count() >= k)
}

#[test]
fn exhaustive_search_matches_brute_force() {
    let pool = [gender(), country(), age()];
    let mut r = rng(41);
    for case in 0..60 {
        let n_attr = r.random_range(1..=3);
        let trees: Vec<GeneralizationTree> = pool[..n_attr].to_vec();
        let n = r.random_range(1..=12);
        let rows = random_rows(&mut r, &trees, n);
        let k = r.random_range(1..=n.min(5));
        let report = lattice_search(&rows, &trees, k, Strategy::Exhaustive).unwrap();

        let lattice = build_lattice(&trees).unwrap();
        let anonymous: Vec<&LatticeNode> = lattice
            .nodes
            .iter()
            .filter(|node| node_is_anonymous(&rows, &trees, node, k))
            .collect();
        let best = anonymous.iter().map(|n| n.level_sum()).min().unwrap();
        let mut expected: Vec<LatticeNode> = anonymous
            .into_iter()
            .filter(|n| n.level_sum() == best)
            .cloned()
            .collect();
        expected.sort();
        assert_eq!(report.minimal_nodes, expected, "case {case}");
    }
}

#[test]
fn partitions_coarsen_and_anonymity_persists_along_chains() {
    let trees = [gender(), country(), age()];
    let heights: Vec<usize> = trees.iter().map(|t| t.height()).collect();
    let mut r = rng(42);
    for _ in 0..40 {
        let n = r.random_range(1..=12);
        let rows = random_rows(&mut r, &trees, n);
        let k = r.random_range(1..=n);
        for path in [lower_chain(&heights), upper_chain(&heights)] {
            let report = chain_sweep(&rows, &trees, &path, k).unwrap();
            for j in 1..path.len() {
                let (fine, coarse) = (&report.partitions[j - 1], &report.partitions[j]);
                assert!(fine
                    .iter()
                    .all(|c| coarse.iter().any(|big| c.iter().all(|r| big.contains(r)))));
                if report.anonymous[j - 1] {
                    assert!(report.anonymous[j]);
                }
            }
            for j in 0..path.len() {
                let live: usize = report
                    .bars
                    .iter()
                    .filter(|b| b.is_live_at(j))
                    .map(|b| b.weight_at(j))
                    .sum();
                assert_eq!(live, n);
                assert_eq!(
                    report.bars.iter().filter(|b| b.is_live_at(j)).count(),
                    report.partitions[j].len()
                );
            }
        }
    }
}

#[test]
fn three_row_fixture() {
    let trees = [gender(), country()];
    let rows = vec![
        vec!["M", "Portugal"],
        vec!["F", "Spain"],
        vec!["M", "Hungary"],
    ];
    assert_eq!(generalize_value(&trees[1], "USA", 2).unwrap(), "America");
    assert_eq!(
        generalized_partition_at(&rows, &trees, &LatticeNode(vec![1, 2])).unwrap(),
        vec![vec![0, 1, 2]]
    );
    let lattice = build_lattice(&trees).unwrap();
    assert_eq!(lattice.nodes.len(), 8);

    let ex = lattice_search(&rows, &trees, 3, Strategy::Exhaustive).unwrap();
    assert_eq!(ex.minimal_nodes, vec![LatticeNode(vec![1, 2])]);
    let anonymous: Vec<String> = ex
        .evaluations
        .iter()
        .filter(|e| e.anonymous)
        .map(|e| e.node.to_string())
        .collect();
    assert_eq!(anonymous, ["(1,2)", "(1,3)"]);

    // Gender stays split along the lower chain, so the search has to fall
    // through to the upper chain.
    let chained = lattice_search(&rows, &trees, 3, Strategy::LowerThenUpper).unwrap();
    assert!(chained.upper_chain_computed);
    assert_eq!(chained.chains[0].first_anonymous(), None);
    assert_eq!(chained.minimal_nodes, vec![LatticeNode(vec![1, 2])]);
}

#[test]
fn lower_chain_success_stops_the_search() {
    let trees = [gender(), country()];
    let rows = vec![
        vec!["M", "Portugal"],
        vec!["M", "Spain"],
        vec!["M", "Hungary"],
    ];
    let r = lattice_search(&rows, &trees, 3, Strategy::LowerThenUpper).unwrap();
    assert!(!r.upper_chain_computed);
    assert_eq!(r.chains.len(), 1);
    assert_eq!(r.minimal_nodes, vec![LatticeNode(vec![0, 2])]);
}

#[test]
fn final_node_is_always_anonymous_for_k_equal_rows() {
    let trees = [gender(), country(), age()];
    let heights: Vec<usize> = trees.iter().map(|t| t.height()).collect();
    let mut r = rng(43);
    for _ in 0..20 {
        let n = r.random_range(1..=10);
        let rows = random_rows(&mut r, &trees, n);
        let path = lower_chain(&heights);
        let mut full = path.clone();
        let mut last = full.last().unwrap().clone();
        while last.0[0] < heights[0] {
            last.0[0] += 1;
            full.push(last.clone());
        }
        let report = chain_sweep(&rows, &trees, &full, n).unwrap();
        assert!(*report.anonymous.last().unwrap());
    }
}
