//! Tree objectives: Hierarchical-Revenue, CKMM and Dasgupta.
//!
//! Revenue is earned per separated pair. When a split `S -> (S1, S2)`
//! separates `i ∈ S1` from `j ∈ S2`, the pair earns
//! `min(d(i, j) / δ, 1)` where `δ` is the larger of `d(i, ρ(S1))` and
//! `d(j, ρ(S2))`. A zero `δ` earns the full unit whatever `d(i, j)` is.
//!
//! CKMM and Dasgupta share the same arithmetic,
//! `Σ_{i<j} w(i, j) · |leaves(lca(i, j))|`, maximized over dissimilarities
//! for CKMM and minimized over similarities for Dasgupta.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metric::{approx_eq, sq_dist, DistanceMatrix, PointSet, Triple};
use crate::tree::{enumerate_trees, HierTree, NodeId, Split};

/// A pair earns at least this much revenue to count toward a high-revenue point.
pub const HIGH_REVENUE_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjectiveKind {
    Revenue,
    Ckmm,
    Dasgupta,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 3] = [Self::Revenue, Self::Ckmm, Self::Dasgupta];

    pub fn name(self) -> &'static str {
        match self {
            Self::Revenue => "revenue",
            Self::Ckmm => "ckmm",
            Self::Dasgupta => "dasgupta",
        }
    }

    /// Dasgupta is a cost; the other two are maximized.
    pub fn maximize(self) -> bool {
        !matches!(self, Self::Dasgupta)
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown objective '{s}'")))
    }
}

/// Per-split and total values of one objective on one tree.
///
/// `upper_bound` is `C(n, 2)` for revenue and `n · Σ d` for CKMM. For the
/// Dasgupta cost it carries the trivial lower bound `2 · Σ w` instead.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveReport {
    pub kind: ObjectiveKind,
    pub total: f64,
    pub per_split: Vec<(Split, f64)>,
    pub upper_bound: f64,
}

impl ObjectiveReport {
    /// `parent_size,left_size,right_size,value` per split, then total and bound rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("parent_size,left_size,right_size,value\n");
        for (s, v) in &self.per_split {
            let _ = writeln!(out, "{},{},{},{}", s.parent.len(), s.left.len(), s.right.len(), v);
        }
        let _ = writeln!(out, "total,,,{}", self.total);
        let bound = if self.kind.maximize() { "upper_bound" } else { "lower_bound" };
        let _ = writeln!(out, "{bound},,,{}", self.upper_bound);
        out
    }
}

fn pair_value(d: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        1.0
    } else {
        (d / delta).min(1.0)
    }
}

/// Distances of each member of `set` to the set's centroid.
fn centroid_distances(points: &PointSet, set: &[usize]) -> Vec<f64> {
    let c = points.centroid_unchecked(set);
    set.iter().map(|&i| sq_dist(points.point(i), &c).sqrt()).collect()
}

fn check_sides(points: &PointSet, left: &[usize], right: &[usize]) -> Result<()> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = points.len();
    let mut seen = vec![false; n];
    for &i in left.iter().chain(right) {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::Invalid(format!("index {i} is on both sides of the split")));
        }
    }
    Ok(())
}

/// Revenue earned by separating `i ∈ left` from `j ∈ right`.
pub fn pair_revenue(
    points: &PointSet,
    left: &[usize],
    right: &[usize],
    i: usize,
    j: usize,
) -> Result<f64> {
    check_sides(points, left, right)?;
    if !left.contains(&i) || !right.contains(&j) {
        return Err(Error::Invalid(format!("pair ({i}, {j}) does not cross the split")));
    }
    let di = sq_dist(points.point(i), &points.centroid_unchecked(left)).sqrt();
    let dj = sq_dist(points.point(j), &points.centroid_unchecked(right)).sqrt();
    Ok(pair_value(points.dist(i, j), di.max(dj)))
}

fn split_revenue_unchecked(points: &PointSet, left: &[usize], right: &[usize]) -> f64 {
    let dl = centroid_distances(points, left);
    let dr = centroid_distances(points, right);
    let mut total = 0.0;
    for (&i, &di) in left.iter().zip(&dl) {
        for (&j, &dj) in right.iter().zip(&dr) {
            total += pair_value(points.dist(i, j), di.max(dj));
        }
    }
    total
}

/// `rev(S1, S2)`: revenue summed over all pairs a split separates.
pub fn split_revenue(points: &PointSet, left: &[usize], right: &[usize]) -> Result<f64> {
    check_sides(points, left, right)?;
    Ok(split_revenue_unchecked(points, left, right))
}

/// How [`tree_revenue`] accumulates pair revenues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevenueMode {
    /// Walk the splits and sum each split's cross pairs.
    SplitSum,
    /// Walk all pairs and charge each to the split at its least common ancestor.
    PairSum,
}

fn check_leaves(tree: &HierTree, n: usize) -> Result<()> {
    if tree.n_leaves() != n {
        return Err(Error::SizeMismatch { expected: n, found: tree.n_leaves() });
    }
    Ok(())
}

/// Total revenue without the per-split breakdown.
pub fn revenue_total(points: &PointSet, tree: &HierTree) -> Result<f64> {
    check_leaves(tree, points.len())?;
    Ok(tree
        .internal_nodes()
        .into_iter()
        .map(|id| {
            let (a, b) = tree.children(id).expect("internal node");
            split_revenue_unchecked(points, tree.leaves_in_order(a), tree.leaves_in_order(b))
        })
        .sum())
}

pub fn tree_revenue(points: &PointSet, tree: &HierTree, mode: RevenueMode) -> Result<ObjectiveReport> {
    let n = points.len();
    check_leaves(tree, n)?;
    let internal = tree.internal_nodes();
    let values = match mode {
        RevenueMode::SplitSum => internal
            .iter()
            .map(|&id| {
                let (a, b) = tree.children(id).expect("internal node");
                split_revenue_unchecked(points, tree.leaves_in_order(a), tree.leaves_in_order(b))
            })
            .collect(),
        RevenueMode::PairSum => pair_sum_revenues(points, tree, &internal),
    };
    let per_split: Vec<(Split, f64)> = internal
        .iter()
        .zip(values)
        .map(|(&id, v)| (tree.split_at(id).expect("internal node"), v))
        .collect();
    Ok(ObjectiveReport {
        kind: ObjectiveKind::Revenue,
        total: per_split.iter().map(|(_, v)| v).sum(),
        per_split,
        upper_bound: revenue_upper_bound(n),
    })
}

fn pair_sum_revenues(points: &PointSet, tree: &HierTree, internal: &[NodeId]) -> Vec<f64> {
    let n = points.len();
    // side_dist[leaf][t]: distance from the leaf to the centroid of its side
    // at the ancestor of depth t
    let mut side_dist: Vec<Vec<f64>> =
        (0..n).map(|i| vec![f64::NAN; tree.depth(tree.leaf_node(i))]).collect();
    for &id in internal {
        let t = tree.depth(id);
        let (a, b) = tree.children(id).expect("internal node");
        for side in [a, b] {
            let members = tree.leaves_in_order(side);
            for (&i, d) in members.iter().zip(centroid_distances(points, members)) {
                side_dist[i][t] = d;
            }
        }
    }
    let mut slot = vec![usize::MAX; tree.nodes().len()];
    for (k, &id) in internal.iter().enumerate() {
        slot[id] = k;
    }
    let mut values = vec![0.0; internal.len()];
    for i in 0..n {
        for j in i + 1..n {
            let lca = tree.lca(i, j);
            let t = tree.depth(lca);
            let delta = side_dist[i][t].max(side_dist[j][t]);
            values[slot[lca]] += pair_value(points.dist(i, j), delta);
        }
    }
    values
}

/// Maximum possible revenue, one unit per pair: `n(n - 1)/2`.
pub fn revenue_upper_bound(n: usize) -> f64 {
    (n as f64) * (n.saturating_sub(1) as f64) / 2.0
}

fn lca_weighted(kind: ObjectiveKind, matrix: &DistanceMatrix, tree: &HierTree) -> Result<ObjectiveReport> {
    let n = matrix.len();
    check_leaves(tree, n)?;
    let per_split: Vec<(Split, f64)> = tree
        .internal_nodes()
        .into_iter()
        .map(|id| {
            let (a, b) = tree.children(id).expect("internal node");
            let right = tree.leaves_in_order(b);
            let cross: f64 = tree
                .leaves_in_order(a)
                .iter()
                .map(|&i| right.iter().map(|&j| matrix.get(i, j)).sum::<f64>())
                .sum();
            (tree.split_at(id).expect("internal node"), tree.leaf_count(id) as f64 * cross)
        })
        .collect();
    let pairs = matrix.pair_sum();
    let upper_bound = match kind {
        ObjectiveKind::Dasgupta => 2.0 * pairs,
        _ => n as f64 * pairs,
    };
    Ok(ObjectiveReport { kind, total: per_split.iter().map(|(_, v)| v).sum(), per_split, upper_bound })
}

/// CKMM value `Σ_{i<j} d(i, j) · |leaves(lca(i, j))|`.
pub fn ckmm_value(dist: &DistanceMatrix, tree: &HierTree) -> Result<ObjectiveReport> {
    lca_weighted(ObjectiveKind::Ckmm, dist, tree)
}

/// Dasgupta cost `Σ_{i<j} w(i, j) · |leaves(lca(i, j))|` for similarity weights.
pub fn dasgupta_cost(weights: &DistanceMatrix, tree: &HierTree) -> Result<ObjectiveReport> {
    lca_weighted(ObjectiveKind::Dasgupta, weights, tree)
}

/// The CKMM / Dasgupta sum split into triangle and pair contributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleDecomposition {
    pub triple_sum: f64,
    pub pair_term: f64,
    pub reconstructed_total: f64,
}

/// Depth of the least common ancestor for every pair of leaves.
fn lca_depths(tree: &HierTree) -> Vec<Vec<usize>> {
    let n = tree.n_leaves();
    let mut depth = vec![vec![0; n]; n];
    for id in tree.internal_nodes() {
        let (a, b) = tree.children(id).expect("internal node");
        let t = tree.depth(id);
        for &i in tree.leaves_in_order(a) {
            for &j in tree.leaves_in_order(b) {
                depth[i][j] = t;
                depth[j][i] = t;
            }
        }
    }
    depth
}

/// Per-triple contribution for every unordered triple `i < j < k`.
///
/// In a binary tree exactly one of the three pairs is separated strictly
/// below the triple's common ancestor; the triangle contributes the two
/// distances that do not belong to that pair.
pub fn triangle_revenues(matrix: &DistanceMatrix, tree: &HierTree) -> Result<Vec<(Triple, f64)>> {
    let n = matrix.len();
    check_leaves(tree, n)?;
    if n < 3 {
        return Err(Error::Invalid(format!("triangle decomposition needs n >= 3, got {n}")));
    }
    let depth = lca_depths(tree);
    let mut out = Vec::with_capacity(n * (n - 1) * (n - 2) / 6);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (ij, ik, jk) = (depth[i][j], depth[i][k], depth[j][k]);
                let (dij, dik, djk) = (matrix.get(i, j), matrix.get(i, k), matrix.get(j, k));
                let value = if ij > ik && ij > jk {
                    dik + djk
                } else if ik > ij && ik > jk {
                    dij + djk
                } else {
                    debug_assert!(jk > ij && jk > ik);
                    dij + dik
                };
                out.push(((i, j, k), value));
            }
        }
    }
    Ok(out)
}

pub fn triangle_decompose(matrix: &DistanceMatrix, tree: &HierTree) -> Result<TriangleDecomposition> {
    let triple_sum = triangle_revenues(matrix, tree)?.iter().map(|(_, v)| v).sum::<f64>();
    let pair_term = 2.0 * matrix.pair_sum();
    Ok(TriangleDecomposition { triple_sum, pair_term, reconstructed_total: triple_sum + pair_term })
}

/// High-revenue classification of the larger side of a split.
#[derive(Debug, Clone, PartialEq)]
pub struct HighRevenueStats {
    /// The larger side (the first argument on a size tie).
    pub side_a: Vec<usize>,
    pub side_b: Vec<usize>,
    pub high_revenue_points_in_larger: Vec<usize>,
    pub fraction: f64,
}

/// Points `u` of the larger side `A` earning at least
/// [`HIGH_REVENUE_THRESHOLD`] against at least half of the other side `B`.
pub fn high_revenue_stats(points: &PointSet, left: &[usize], right: &[usize]) -> Result<HighRevenueStats> {
    check_sides(points, left, right)?;
    let (a, b) = if left.len() >= right.len() { (left, right) } else { (right, left) };
    let da = centroid_distances(points, a);
    let db = centroid_distances(points, b);
    let high: Vec<usize> = a
        .iter()
        .zip(&da)
        .filter(|&(&u, &du)| {
            let hits = b
                .iter()
                .zip(&db)
                .filter(|&(&v, &dv)| pair_value(points.dist(u, v), du.max(dv)) >= HIGH_REVENUE_THRESHOLD)
                .count();
            2 * hits >= b.len()
        })
        .map(|(&u, _)| u)
        .collect();
    Ok(HighRevenueStats {
        fraction: high.len() as f64 / a.len() as f64,
        side_a: a.to_vec(),
        side_b: b.to_vec(),
        high_revenue_points_in_larger: high,
    })
}

/// Input to an objective: coordinates, or just a dissimilarity/similarity matrix.
#[derive(Debug, Clone, Copy)]
pub enum Instance<'a> {
    Points(&'a PointSet),
    Matrix(&'a DistanceMatrix),
}

impl Instance<'_> {
    pub fn len(&self) -> usize {
        match self {
            Instance::Points(p) => p.len(),
            Instance::Matrix(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluates `kind` on `tree`; revenue needs coordinates.
pub fn evaluate(instance: Instance<'_>, tree: &HierTree, kind: ObjectiveKind) -> Result<ObjectiveReport> {
    match (kind, instance) {
        (ObjectiveKind::Revenue, Instance::Points(p)) => tree_revenue(p, tree, RevenueMode::SplitSum),
        (ObjectiveKind::Revenue, Instance::Matrix(_)) => {
            Err(Error::Invalid("the revenue objective needs point coordinates".into()))
        }
        (ObjectiveKind::Ckmm, Instance::Points(p)) => ckmm_value(&p.pairwise_distances(), tree),
        (ObjectiveKind::Ckmm, Instance::Matrix(m)) => ckmm_value(m, tree),
        (ObjectiveKind::Dasgupta, Instance::Points(p)) => dasgupta_cost(&p.pairwise_distances(), tree),
        (ObjectiveKind::Dasgupta, Instance::Matrix(m)) => dasgupta_cost(m, tree),
    }
}

/// Exact optimum over every tree on at most seven leaves.
///
/// Among trees within relative tolerance of the optimum, the one with the
/// smallest canonical serialization wins.
pub fn brute_force_opt(instance: Instance<'_>, kind: ObjectiveKind) -> Result<(HierTree, f64)> {
    let n = instance.len();
    if n > crate::tree::MAX_ENUMERATION_LEAVES {
        return Err(Error::TooLarge { n, limit: crate::tree::MAX_ENUMERATION_LEAVES });
    }
    if n == 1 {
        let tree = HierTree::singleton();
        let value = evaluate(instance, &tree, kind)?.total;
        return Ok((tree, value));
    }
    let matrix;
    let instance = match (kind, instance) {
        (ObjectiveKind::Revenue, _) => instance,
        (_, Instance::Points(p)) => {
            matrix = p.pairwise_distances();
            Instance::Matrix(&matrix)
        }
        (_, m) => m,
    };
    let scored: Vec<(HierTree, f64)> = enumerate_trees(n)?
        .map(|t| evaluate(instance, &t, kind).map(|r| (t, r.total)))
        .collect::<Result<_>>()?;
    let better = |a: f64, b: f64| if kind.maximize() { a > b } else { a < b };
    let best = scored
        .iter()
        .map(|(_, v)| *v)
        .fold(None, |acc: Option<f64>, v| match acc {
            Some(b) if !better(v, b) => Some(b),
            _ => Some(v),
        })
        .expect("at least one tree");
    scored
        .into_iter()
        .filter(|(_, v)| approx_eq(*v, best))
        .min_by_key(|(t, _)| t.canonical())
        .map(|(t, v)| (t, v))
        .ok_or_else(|| Error::Invalid("no optimal tree".into()))
}
