//! Generalization trees for categorical attributes, the product lattice of
//! per-attribute levels, and sweeps along monotone chains of that lattice.
//!
//! Levels count upward from the leaves: every leaf sits at level 0 and the
//! root at the tree height. Rows are equivalent at a lattice node when their
//! generalized tuples at the node's levels coincide.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializable tree description: a root and `parent -> children` lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub attribute: String,
    pub root: String,
    #[serde(default)]
    pub children: BTreeMap<String, Vec<String>>,
    /// Leaves are numeric bins written `lo..hi`; raw numbers map to the
    /// first bin with `lo <= x <= hi`.
    #[serde(default)]
    pub numeric: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeViolation {
    RootHasParent(String),
    Orphan(String),
    MultipleParents {
        node: String,
        parents: Vec<String>,
    },
    Unreachable(String),
    DuplicateChild {
        parent: String,
        child: String,
    },
    LevelGap {
        leaf: String,
        depth: usize,
        height: usize,
    },
    BadBin(String),
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RootHasParent(n) => write!(f, "root `{n}` is listed as a child"),
            Self::Orphan(n) => write!(f, "node `{n}` has no parent and is not the root"),
            Self::MultipleParents { node, parents } => {
                write!(
                    f,
                    "node `{node}` has several parents: {}",
                    parents.join(", ")
                )
            }
            Self::Unreachable(n) => write!(f, "node `{n}` is not reachable from the root"),
            Self::DuplicateChild { parent, child } => {
                write!(f, "`{parent}` lists child `{child}` twice")
            }
            Self::LevelGap {
                leaf,
                depth,
                height,
            } => write!(
                f,
                "leaf `{leaf}` sits at depth {depth} but the tree has height {height}"
            ),
            Self::BadBin(n) => write!(f, "leaf `{n}` is not a numeric bin `lo..hi`"),
        }
    }
}

/// Every structural problem of `spec`; empty when the tree is valid.
pub fn validate_tree(spec: &TreeSpec) -> Vec<TreeViolation> {
    let mut violations = Vec::new();
    let mut parents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (parent, kids) in &spec.children {
        let mut seen = Vec::new();
        for kid in kids {
            if seen.contains(&kid) {
                violations.push(TreeViolation::DuplicateChild {
                    parent: parent.clone(),
                    child: kid.clone(),
                });
                continue;
            }
            seen.push(kid);
            parents.entry(kid).or_default().push(parent);
        }
    }

    if parents.contains_key(spec.root.as_str()) {
        violations.push(TreeViolation::RootHasParent(spec.root.clone()));
    }
    for node in spec.children.keys() {
        if node != &spec.root && !parents.contains_key(node.as_str()) {
            violations.push(TreeViolation::Orphan(node.clone()));
        }
    }
    for (node, ps) in &parents {
        if ps.len() > 1 {
            violations.push(TreeViolation::MultipleParents {
                node: node.to_string(),
                parents: ps.iter().map(|p| p.to_string()).collect(),
            });
        }
    }

    // Depth-first from the root; a node is entered once, so cycles terminate.
    let mut depth: HashMap<&str, usize> = HashMap::new();
    let mut stack = vec![(spec.root.as_str(), 0usize)];
    while let Some((node, d)) = stack.pop() {
        if depth.contains_key(node) {
            continue;
        }
        depth.insert(node, d);
        if let Some(kids) = spec.children.get(node) {
            for kid in kids.iter().rev() {
                stack.push((kid, d + 1));
            }
        }
    }
    for node in parents.keys() {
        if !depth.contains_key(node) {
            violations.push(TreeViolation::Unreachable(node.to_string()));
        }
    }

    let is_leaf = |n: &str| spec.children.get(n).is_none_or(|k| k.is_empty());
    let mut leaves: Vec<(&str, usize)> = depth
        .iter()
        .filter(|(n, _)| is_leaf(n))
        .map(|(n, d)| (*n, *d))
        .collect();
    leaves.sort();
    let height = leaves.iter().map(|l| l.1).max().unwrap_or(0);
    for &(leaf, d) in &leaves {
        if d != height {
            violations.push(TreeViolation::LevelGap {
                leaf: leaf.to_string(),
                depth: d,
                height,
            });
        }
        if spec.numeric && parse_bin(leaf).is_none() {
            violations.push(TreeViolation::BadBin(leaf.to_string()));
        }
    }
    violations
}

fn parse_bin(name: &str) -> Option<(f64, f64)> {
    let (lo, hi) = name.split_once("..")?;
    let (lo, hi) = (
        lo.trim().parse::<f64>().ok()?,
        hi.trim().parse::<f64>().ok()?,
    );
    (lo.is_finite() && hi.is_finite() && lo <= hi).then_some((lo, hi))
}

/// A validated tree with every node's ancestor chain precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizationTree {
    attribute: String,
    height: usize,
    /// `ancestors[leaf][s]` is the node name at level `s`.
    ancestors: Vec<Vec<String>>,
    leaf_index: HashMap<String, usize>,
    bins: Option<Vec<(f64, f64)>>,
}

impl GeneralizationTree {
    pub fn from_spec(spec: &TreeSpec) -> Result<Self> {
        let violations = validate_tree(spec);
        if !violations.is_empty() {
            return Err(Error::InvalidTree {
                attribute: spec.attribute.clone(),
                violations,
            });
        }
        let mut ancestors = Vec::new();
        let mut stack = vec![vec![spec.root.clone()]];
        while let Some(path) = stack.pop() {
            let node = path.last().expect("nonempty path");
            match spec.children.get(node).filter(|k| !k.is_empty()) {
                Some(kids) => {
                    for kid in kids.iter().rev() {
                        let mut next = path.clone();
                        next.push(kid.clone());
                        stack.push(next);
                    }
                }
                None => {
                    let mut up = path;
                    up.reverse();
                    ancestors.push(up);
                }
            }
        }
        let height = ancestors[0].len() - 1;
        let leaf_index = ancestors
            .iter()
            .enumerate()
            .map(|(i, a)| (a[0].clone(), i))
            .collect();
        let bins = spec.numeric.then(|| {
            ancestors
                .iter()
                .map(|a| parse_bin(&a[0]).expect("validated bin"))
                .collect()
        });
        Ok(Self {
            attribute: spec.attribute.clone(),
            height,
            ancestors,
            leaf_index,
            bins,
        })
    }

    /// Builds from `(parent, children)` pairs.
    pub fn from_pairs(attribute: &str, root: &str, pairs: &[(&str, &[&str])]) -> Result<Self> {
        Self::from_spec(&TreeSpec {
            attribute: attribute.into(),
            root: root.into(),
            children: pairs
                .iter()
                .map(|(p, ks)| (p.to_string(), ks.iter().map(|k| k.to_string()).collect()))
                .collect(),
            numeric: false,
        })
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn root(&self) -> &str {
        &self.ancestors[0][self.height]
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> impl Iterator<Item = &str> {
        self.ancestors.iter().map(|a| a[0].as_str())
    }

    /// Leaf position of a raw cell value.
    pub fn leaf_of(&self, value: &str) -> Result<usize> {
        if let Some(&i) = self.leaf_index.get(value) {
            return Ok(i);
        }
        if let (Some(bins), Ok(x)) = (&self.bins, value.trim().parse::<f64>()) {
            if let Some(i) = bins.iter().position(|&(lo, hi)| lo <= x && x <= hi) {
                return Ok(i);
            }
        }
        Err(Error::UnknownValue {
            attribute: self.attribute.clone(),
            value: value.into(),
        })
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.height {
            Err(Error::LevelOutOfRange {
                attribute: self.attribute.clone(),
                level,
                height: self.height,
            })
        } else {
            Ok(())
        }
    }

    fn ancestor(&self, leaf: usize, level: usize) -> &str {
        &self.ancestors[leaf][level]
    }
}

/// The ancestor of `value` at `level`.
pub fn generalize_value<'t>(
    tree: &'t GeneralizationTree,
    value: &str,
    level: usize,
) -> Result<&'t str> {
    tree.check_level(level)?;
    Ok(tree.ancestor(tree.leaf_of(value)?, level))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeNode(pub Vec<usize>);

impl LatticeNode {
    pub fn levels(&self) -> &[usize] {
        &self.0
    }

    pub fn level_sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// True if `other` is reached by raising exactly one level by one.
    pub fn is_step_to(&self, other: &LatticeNode) -> bool {
        self.0.len() == other.0.len()
            && self.level_sum() + 1 == other.level_sum()
            && self.0.iter().zip(&other.0).all(|(a, b)| b >= a)
    }

    /// Componentwise `<=`.
    pub fn precedes(&self, other: &LatticeNode) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for LatticeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizationLattice {
    pub heights: Vec<usize>,
    /// Lexicographic order.
    pub nodes: Vec<LatticeNode>,
    /// Index pairs into `nodes`.
    pub edges: Vec<(usize, usize)>,
}

pub fn build_lattice(trees: &[GeneralizationTree]) -> Result<GeneralizationLattice> {
    if trees.is_empty() {
        return Err(Error::NoTrees);
    }
    let heights: Vec<usize> = trees.iter().map(GeneralizationTree::height).collect();
    let mut nodes = vec![LatticeNode(Vec::new())];
    for &h in &heights {
        nodes = nodes
            .into_iter()
            .flat_map(|n| {
                (0..=h).map(move |s| {
                    let mut v = n.0.clone();
                    v.push(s);
                    LatticeNode(v)
                })
            })
            .collect();
    }
    let index: HashMap<&LatticeNode, usize> =
        nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
    let mut edges = Vec::new();
    for (i, n) in nodes.iter().enumerate() {
        for a in 0..heights.len() {
            if n.0[a] < heights[a] {
                let mut up = n.0.clone();
                up[a] += 1;
                edges.push((i, index[&LatticeNode(up)]));
            }
        }
    }
    Ok(GeneralizationLattice {
        heights,
        nodes,
        edges,
    })
}

/// Leaf positions of every cell, checked against the trees.
pub fn encode_rows<S: AsRef<str>>(
    rows: &[Vec<S>],
    trees: &[GeneralizationTree],
) -> Result<Vec<Vec<usize>>> {
    rows.iter()
        .map(|row| {
            if row.len() != trees.len() {
                return Err(Error::ArityMismatch {
                    expected: trees.len(),
                    found: row.len(),
                });
            }
            row.iter()
                .zip(trees)
                .map(|(v, t)| t.leaf_of(v.as_ref()))
                .collect()
        })
        .collect()
}

fn check_node(trees: &[GeneralizationTree], node: &LatticeNode) -> Result<()> {
    if node.0.len() != trees.len() {
        return Err(Error::ArityMismatch {
            expected: trees.len(),
            found: node.0.len(),
        });
    }
    trees
        .iter()
        .zip(&node.0)
        .try_for_each(|(t, &s)| t.check_level(s))
}

fn partition_encoded(
    encoded: &[Vec<usize>],
    trees: &[GeneralizationTree],
    node: &LatticeNode,
) -> Vec<Vec<usize>> {
    let mut groups: HashMap<Vec<&str>, Vec<usize>> = HashMap::new();
    for (r, leaves) in encoded.iter().enumerate() {
        let key: Vec<&str> = leaves
            .iter()
            .zip(trees)
            .zip(&node.0)
            .map(|((&leaf, t), &s)| t.ancestor(leaf, s))
            .collect();
        groups.entry(key).or_default().push(r);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// Classes of identical generalized tuples at `node`, ordered by first row.
pub fn generalized_partition_at<S: AsRef<str>>(
    rows: &[Vec<S>],
    trees: &[GeneralizationTree],
    node: &LatticeNode,
) -> Result<Vec<Vec<usize>>> {
    check_node(trees, node)?;
    let encoded = encode_rows(rows, trees)?;
    Ok(partition_encoded(&encoded, trees, node))
}

fn is_k_anonymous(partition: &[Vec<usize>], k: usize, n: usize) -> bool {
    k <= n && partition.iter().all(|c| c.len() >= k)
}

/// An `H0` bar over path positions; the tracked class is named by its
/// smallest row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainBar {
    pub row: usize,
    pub birth: usize,
    pub death: Option<usize>,
    /// `(path index, class size)` steps.
    pub weight_steps: Vec<(usize, usize)>,
}

impl ChainBar {
    pub fn is_live_at(&self, index: usize) -> bool {
        self.birth <= index && self.death.is_none_or(|d| index < d)
    }

    pub fn weight_at(&self, index: usize) -> usize {
        self.weight_steps
            .iter()
            .take_while(|(i, _)| *i <= index)
            .last()
            .map_or(0, |&(_, w)| w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub k: usize,
    pub path: Vec<LatticeNode>,
    pub partitions: Vec<Vec<Vec<usize>>>,
    pub anonymous: Vec<bool>,
    pub bars: Vec<ChainBar>,
}

impl ChainReport {
    /// First path position whose partition is k-anonymous.
    pub fn first_anonymous(&self) -> Option<usize> {
        self.anonymous.iter().position(|&a| a)
    }
}

pub fn chain_sweep<S: AsRef<str>>(
    rows: &[Vec<S>],
    trees: &[GeneralizationTree],
    path: &[LatticeNode],
    k: usize,
) -> Result<ChainReport> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    for node in path {
        check_node(trees, node)?;
    }
    if let Some(step) = path.windows(2).position(|w| !w[0].is_step_to(&w[1])) {
        return Err(Error::NonMonotonePath(step + 1));
    }
    let encoded = encode_rows(rows, trees)?;
    let partitions: Vec<Vec<Vec<usize>>> = path
        .par_iter()
        .map(|node| partition_encoded(&encoded, trees, node))
        .collect();
    let anonymous = partitions
        .iter()
        .map(|p| is_k_anonymous(p, k, rows.len()))
        .collect();
    let bars = chain_bars(&partitions);
    Ok(ChainReport {
        k,
        path: path.to_vec(),
        partitions,
        anonymous,
        bars,
    })
}

/// Elder rule over a coarsening sequence of partitions: in every merged
/// class the bar of the smallest row survives.
fn chain_bars(partitions: &[Vec<Vec<usize>>]) -> Vec<ChainBar> {
    let Some(first) = partitions.first() else {
        return Vec::new();
    };
    let mut bars: BTreeMap<usize, ChainBar> = first
        .iter()
        .map(|c| {
            (
                c[0],
                ChainBar {
                    row: c[0],
                    birth: 0,
                    death: None,
                    weight_steps: vec![(0, c.len())],
                },
            )
        })
        .collect();
    for (j, partition) in partitions.iter().enumerate().skip(1) {
        for class in partition {
            let live: Vec<usize> = class
                .iter()
                .copied()
                .filter(|r| bars.get(r).is_some_and(|b| b.death.is_none()))
                .collect();
            let Some((&elder, younger)) = live.split_first() else {
                continue;
            };
            if younger.is_empty() {
                continue;
            }
            for r in younger {
                if let Some(b) = bars.get_mut(r) {
                    b.death = Some(j);
                }
            }
            if let Some(b) = bars.get_mut(&elder) {
                b.weight_steps.push((j, class.len()));
            }
        }
    }
    bars.into_values().collect()
}

/// Full path through the attributes after the first, raising the last
/// attribute to its root before the one before it, and so on.
fn row_chain(heights: &[usize], first_level: usize) -> Vec<LatticeNode> {
    let mut node = vec![0; heights.len()];
    node[0] = first_level;
    let mut path = vec![LatticeNode(node.clone())];
    for a in (1..heights.len()).rev() {
        for _ in 0..heights[a] {
            node[a] += 1;
            path.push(LatticeNode(node.clone()));
        }
    }
    path
}

/// Bottom row of the lattice diagram: the first attribute stays ungeneralized.
/// With a single attribute this is the whole path to the root.
pub fn lower_chain(heights: &[usize]) -> Vec<LatticeNode> {
    if heights.len() == 1 {
        return (0..=heights[0]).map(|s| LatticeNode(vec![s])).collect();
    }
    row_chain(heights, 0)
}

/// Top row of the lattice diagram: the first attribute at its root. Empty
/// for a single attribute.
pub fn upper_chain(heights: &[usize]) -> Vec<LatticeNode> {
    if heights.len() <= 1 {
        return Vec::new();
    }
    row_chain(heights, heights[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    LowerThenUpper,
    Exhaustive,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lower_then_upper" | "lower-then-upper" => Ok(Self::LowerThenUpper),
            "exhaustive" => Ok(Self::Exhaustive),
            other => Err(format!(
                "unknown strategy `{other}` (expected lower_then_upper or exhaustive)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEvaluation {
    pub node: LatticeNode,
    pub n_classes: usize,
    pub min_class_size: usize,
    pub anonymous: bool,
}

pub const INCONCLUSIVE_NOTE: &str = "no k-anonymous node on the lower or upper chain; \
this cannot conclude that there is no way to k-anonymize the data \
(the chain search does not prove infeasibility)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub k: usize,
    pub strategy: Strategy,
    pub minimal_nodes: Vec<LatticeNode>,
    /// Chains swept, lower first (chain strategy only).
    pub chains: Vec<ChainReport>,
    pub upper_chain_computed: bool,
    /// Every lattice node (exhaustive strategy only).
    pub evaluations: Vec<NodeEvaluation>,
    /// Set when the search found nothing and that does not imply infeasibility.
    pub note: Option<String>,
}

pub fn lattice_search<S: AsRef<str> + Sync>(
    rows: &[Vec<S>],
    trees: &[GeneralizationTree],
    k: usize,
    strategy: Strategy,
) -> Result<SearchReport> {
    if k == 0 {
        return Err(Error::InvalidK);
    }
    let lattice = build_lattice(trees)?;
    let mut report = SearchReport {
        k,
        strategy,
        minimal_nodes: Vec::new(),
        chains: Vec::new(),
        upper_chain_computed: false,
        evaluations: Vec::new(),
        note: None,
    };
    match strategy {
        Strategy::LowerThenUpper => {
            let lower = chain_sweep(rows, trees, &lower_chain(&lattice.heights), k)?;
            let found = lower.first_anonymous().map(|i| lower.path[i].clone());
            report.chains.push(lower);
            let found = match found {
                Some(node) => Some(node),
                None => {
                    let path = upper_chain(&lattice.heights);
                    if path.is_empty() {
                        None
                    } else {
                        let upper = chain_sweep(rows, trees, &path, k)?;
                        report.upper_chain_computed = true;
                        let hit = upper.first_anonymous().map(|i| upper.path[i].clone());
                        report.chains.push(upper);
                        hit
                    }
                }
            };
            match found {
                Some(node) => report.minimal_nodes.push(node),
                None if k <= rows.len() => report.note = Some(INCONCLUSIVE_NOTE.into()),
                None => {}
            }
        }
        Strategy::Exhaustive => {
            let encoded = encode_rows(rows, trees)?;
            report.evaluations = lattice
                .nodes
                .par_iter()
                .map(|node| {
                    let p = partition_encoded(&encoded, trees, node);
                    NodeEvaluation {
                        node: node.clone(),
                        n_classes: p.len(),
                        min_class_size: p.iter().map(Vec::len).min().unwrap_or(0),
                        anonymous: is_k_anonymous(&p, k, rows.len()),
                    }
                })
                .collect();
            let best = report
                .evaluations
                .iter()
                .filter(|e| e.anonymous)
                .map(|e| e.node.level_sum())
                .min();
            if let Some(best) = best {
                report.minimal_nodes = report
                    .evaluations
                    .iter()
                    .filter(|e| e.anonymous && e.node.level_sum() == best)
                    .map(|e| e.node.clone())
                    .collect();
            }
        }
    }
    Ok(report)
}
