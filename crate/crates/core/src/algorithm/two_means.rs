//! 2-means solvers and the bisecting k-means tree built from them.

use crate::error::{Error, Result};
use crate::metric::{sq_dist, PointSet};
use crate::rng::RngStream;
use crate::tree::{HierTree, NodeId, Split, TreeBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Enumerates every bipartition; exact, limited to small sets.
    Exhaustive,
    /// Best of several k-means++-seeded Lloyd runs.
    Lloyd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoMeansConfig {
    pub kind: SolverKind,
    pub max_exhaustive_n: usize,
    pub lloyd_restarts: usize,
    pub lloyd_max_iters: usize,
    /// Lloyd stops once no centroid moves more than this fraction of the set's extent.
    pub lloyd_tol: f64,
    pub seed: u64,
}

impl Default for TwoMeansConfig {
    fn default() -> Self {
        Self {
            kind: SolverKind::Lloyd,
            max_exhaustive_n: 20,
            lloyd_restarts: 10,
            lloyd_max_iters: 100,
            lloyd_tol: 1e-9,
            seed: 0,
        }
    }
}

impl TwoMeansConfig {
    pub fn exhaustive() -> Self {
        Self { kind: SolverKind::Exhaustive, ..Self::default() }
    }

    pub fn lloyd(seed: u64) -> Self {
        Self { kind: SolverKind::Lloyd, seed, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoMeansResult {
    /// `left` always holds the smallest index of the input set.
    pub split: Split,
    pub cost: f64,
}

/// Splits `set` into two nonempty parts minimizing (or, for Lloyd,
/// heuristically reducing) the 2-means cost.
pub fn two_means(points: &PointSet, set: &[usize], config: &TwoMeansConfig) -> Result<TwoMeansResult> {
    if set.len() < 2 {
        return Err(Error::Invalid(format!("2-means needs at least two points, got {}", set.len())));
    }
    let n = points.len();
    if let Some(&bad) = set.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Invalid("duplicate index in 2-means input".into()));
    }
    let (left, right) = match config.kind {
        SolverKind::Exhaustive => {
            if sorted.len() > config.max_exhaustive_n {
                return Err(Error::TooLarge { n: sorted.len(), limit: config.max_exhaustive_n });
            }
            exhaustive(points, &sorted)
        }
        SolverKind::Lloyd => {
            let key = ((sorted[0] as u64) << 32) | sorted.len() as u64;
            lloyd(points, &sorted, config, RngStream::new(config.seed).substream(key))
        }
    };
    let cost = points.one_means_cost(&left)? + points.one_means_cost(&right)?;
    let (left, right) = if left.contains(&sorted[0]) { (left, right) } else { (right, left) };
    Ok(TwoMeansResult { split: Split::new(left, right)?, cost })
}

/// Exact search over the `2^(m-1) - 1` bipartitions with `set[0]` on the left.
///
/// Walks the masks in Gray-code order so each step moves one point and
/// updates the side sums in `O(dim)`. The cost of a bipartition is
/// `Σ|x|² - |Σ_L x|²/|L| - |Σ_R x|²/|R|`.
fn exhaustive(points: &PointSet, set: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let m = set.len();
    let dim = points.dim();
    // centered copy keeps the cancellation in the cost formula small
    let mean = points.centroid_unchecked(set);
    let coords: Vec<f64> = set
        .iter()
        .flat_map(|&i| points.point(i).iter().zip(&mean).map(|(x, c)| x - c))
        .collect();
    let row = |k: usize| &coords[k * dim..(k + 1) * dim];
    let norm2: f64 = coords.iter().map(|x| x * x).sum();
    let tol = 1e-9 * norm2 + 1e-12;

    let mut sum_left = vec![0.0; dim];
    let mut sum_right = vec![0.0; dim];
    let mut in_right = vec![false; m];
    let mut n_right = 0usize;
    let mut best_cost = f64::INFINITY;
    let mut best_right = in_right.clone();

    let total_masks: u64 = 1 << (m - 1);
    for step in 1..total_masks {
        // Gray code g(step) differs from g(step - 1) in the lowest set bit of step.
        let flip = step.trailing_zeros() as usize + 1;
        let sign = if in_right[flip] { -1.0 } else { 1.0 };
        in_right[flip] = !in_right[flip];
        n_right = if sign > 0.0 { n_right + 1 } else { n_right - 1 };
        for ((l, r), x) in sum_left.iter_mut().zip(sum_right.iter_mut()).zip(row(flip)) {
            *l -= sign * x;
            *r += sign * x;
        }
        if n_right == 0 {
            continue;
        }
        let n_left = m - n_right;
        let cost = norm2
            - sum_left.iter().map(|x| x * x).sum::<f64>() / n_left as f64
            - sum_right.iter().map(|x| x * x).sum::<f64>() / n_right as f64;
        if cost < best_cost - tol {
            best_cost = cost;
            best_right.copy_from_slice(&in_right);
        } else if cost <= best_cost + tol && left_precedes(set, &in_right, &best_right) {
            best_cost = best_cost.min(cost);
            best_right.copy_from_slice(&in_right);
        }
    }
    partition(set, &best_right)
}

/// Lexicographic comparison of the sorted left sides of two candidate splits.
fn left_precedes(set: &[usize], cand: &[bool], best: &[bool]) -> bool {
    let left = |mask: &[bool]| set.iter().zip(mask).filter(|(_, &r)| !r).map(|(&i, _)| i).collect::<Vec<_>>();
    left(cand) < left(best)
}

fn partition(set: &[usize], in_right: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let (r, l): (Vec<(usize, bool)>, Vec<(usize, bool)>) =
        set.iter().copied().zip(in_right.iter().copied()).partition(|&(_, r)| r);
    (l.into_iter().map(|x| x.0).collect(), r.into_iter().map(|x| x.0).collect())
}

fn lloyd(points: &PointSet, set: &[usize], config: &TwoMeansConfig, rng: RngStream) -> (Vec<usize>, Vec<usize>) {
    let extent = bounding_diagonal(points, set);
    let mut best: Option<(f64, Vec<bool>)> = None;
    for restart in 0..config.lloyd_restarts.max(1) {
        let mut rng = rng.substream(restart as u64);
        let labels = lloyd_run(points, set, config, extent, &mut rng);
        let (l, r) = partition(set, &labels);
        let cost = one_means(points, &l) + one_means(points, &r);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, labels));
        }
    }
    let (_, labels) = best.expect("at least one restart");
    partition(set, &labels)
}

fn one_means(points: &PointSet, set: &[usize]) -> f64 {
    let c = points.centroid_unchecked(set);
    set.iter().map(|&i| sq_dist(points.point(i), &c)).sum()
}

fn bounding_diagonal(points: &PointSet, set: &[usize]) -> f64 {
    let dim = points.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &i in set {
        for (k, &x) in points.point(i).iter().enumerate() {
            lo[k] = lo[k].min(x);
            hi[k] = hi[k].max(x);
        }
    }
    sq_dist(&lo, &hi).sqrt()
}

/// One k-means++-seeded Lloyd run; returns `true` for points in the second cluster.
fn lloyd_run(
    points: &PointSet,
    set: &[usize],
    config: &TwoMeansConfig,
    extent: f64,
    rng: &mut RngStream,
) -> Vec<bool> {
    let m = set.len();
    let first = points.point(set[rng.index(m)]).to_vec();
    let d2: Vec<f64> = set.iter().map(|&i| sq_dist(points.point(i), &first)).collect();
    let total: f64 = d2.iter().sum();
    let second = if total > 0.0 {
        let target = rng.unit() * total;
        let mut acc = 0.0;
        let mut pick = m - 1;
        for (k, d) in d2.iter().enumerate() {
            acc += d;
            if acc > target && *d > 0.0 {
                pick = k;
                break;
            }
        }
        points.point(set[pick]).to_vec()
    } else {
        first.clone()
    };
    let mut centers = [first, second];
    let mut labels = vec![false; m];
    for _ in 0..config.lloyd_max_iters.max(1) {
        for (k, &i) in set.iter().enumerate() {
            let p = points.point(i);
            labels[k] = sq_dist(p, &centers[1]) < sq_dist(p, &centers[0]);
        }
        repair_empty(points, set, &mut labels);
        let (l, r) = partition(set, &labels);
        let next = [points.centroid_unchecked(&l), points.centroid_unchecked(&r)];
        let moved = sq_dist(&next[0], &centers[0]).sqrt().max(sq_dist(&next[1], &centers[1]).sqrt());
        centers = next;
        if moved <= config.lloyd_tol * extent {
            break;
        }
    }
    labels
}

/// If one cluster is empty, moves into it the point farthest from the other
/// cluster's centroid (lowest position on ties).
fn repair_empty(points: &PointSet, set: &[usize], labels: &mut [bool]) {
    let right = labels.iter().filter(|&&r| r).count();
    let donor = match right {
        0 => false,
        r if r == set.len() => true,
        _ => return,
    };
    let c = points.centroid_unchecked(set);
    let mut far = (0, f64::NEG_INFINITY);
    for (k, &i) in set.iter().enumerate() {
        let d = sq_dist(points.point(i), &c);
        if labels[k] == donor && d > far.1 {
            far = (k, d);
        }
    }
    labels[far.0] = !donor;
}

/// Top-down tree from repeated 2-means splits until every cluster is a single point.
pub fn bisecting_kmeans(points: &PointSet, config: &TwoMeansConfig) -> Result<HierTree> {
    let mut builder = TreeBuilder::new();
    let all: Vec<usize> = (0..points.len()).collect();
    let root = bisect(points, &all, config, &mut builder)?;
    builder.build(root)
}

fn bisect(points: &PointSet, set: &[usize], config: &TwoMeansConfig, builder: &mut TreeBuilder) -> Result<NodeId> {
    if let [only] = set {
        return Ok(builder.leaf(*only));
    }
    let TwoMeansResult { split, .. } = two_means(points, set, config)?;
    let a = bisect(points, &split.left, config, builder)?;
    let b = bisect(points, &split.right, config, builder)?;
    Ok(builder.join(a, b))
}
