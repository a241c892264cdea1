//! Ultrametric ground-truth instances.
//!
//! An [`UltrametricSpec`] is a binary tree with a weight on every internal
//! node, nondecreasing toward the root. It induces the ultrametric
//! `d(x, y) = W(lca(x, y))`, which [`embed_euclidean`] realizes exactly as
//! Euclidean points. Trees whose splits reproduce an ultrametric this way
//! ("generating trees") earn the full revenue of one unit per pair.
//!
//! Text form: the tree format with `:weight` after each internal `)`, as in
//! `((0,1):1,(2,3):1):2`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metric::{DistanceMatrix, PointSet, Triple};
use crate::rng::RngStream;
use crate::tree::{parse_annotated, HierTree, Node, NodeId, Split, TreeBuilder};

#[derive(Debug, Clone, PartialEq)]
pub struct UltrametricSpec {
    tree: HierTree,
    /// Indexed by node id; zero on leaves.
    weights: Vec<f64>,
}

/// How [`generate_random`] draws weight increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    /// Increments in `(0, 1]`, so parent and child weights always differ.
    Strict,
    /// Increment is zero with probability 1/4, otherwise in `(0, 1]`.
    WithTies,
}

impl UltrametricSpec {
    /// Validates `weights` (one per node id; leaf entries are ignored and set to zero).
    pub fn new(tree: HierTree, mut weights: Vec<f64>) -> Result<Self> {
        let m = tree.nodes().len();
        if weights.len() != m {
            return Err(Error::SizeMismatch { expected: m, found: weights.len() });
        }
        for (id, node) in tree.nodes().iter().enumerate() {
            match node {
                Node::Leaf(_) => weights[id] = 0.0,
                Node::Internal(..) => {
                    let w = weights[id];
                    if !(w.is_finite() && w > 0.0) {
                        return Err(Error::Invalid(format!("node weight {w} is not positive")));
                    }
                }
            }
        }
        for id in 0..m {
            if let Some(p) = tree.parent(id) {
                if weights[id] > weights[p] {
                    return Err(Error::NotMonotone { parent: weights[p], child: weights[id] });
                }
            }
        }
        Ok(Self { tree, weights })
    }

    pub fn tree(&self) -> &HierTree {
        &self.tree
    }

    pub fn weight(&self, id: NodeId) -> f64 {
        self.weights[id]
    }

    pub fn n_leaves(&self) -> usize {
        self.tree.n_leaves()
    }

    /// Induced distances `d(x, y) = W(lca(x, y))`.
    pub fn distances(&self) -> DistanceMatrix {
        let n = self.n_leaves();
        let mut data = vec![0.0; n * n];
        for id in self.tree.internal_nodes() {
            let (a, b) = self.tree.children(id).expect("internal node");
            let w = self.weights[id];
            for &i in self.tree.leaves_in_order(a) {
                for &j in self.tree.leaves_in_order(b) {
                    data[i * n + j] = w;
                    data[j * n + i] = w;
                }
            }
        }
        DistanceMatrix::new(n, data).expect("weights are positive and symmetric")
    }
}

impl fmt::Display for UltrametricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.tree.write_annotated(&mut s, &|id| Some(self.weights[id].to_string()))?;
        f.write_str(&s)
    }
}

impl FromStr for UltrametricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tree, weights) = parse_annotated(s)?;
        let mut ws = Vec::with_capacity(weights.len());
        for (id, w) in weights.into_iter().enumerate() {
            match (tree.node(id), w) {
                (Node::Internal(..), Some((w, _))) => ws.push(w),
                (Node::Internal(..), None) => {
                    return Err(Error::Invalid(format!("internal node over leaves {:?} has no weight", tree.leaves(id))));
                }
                (Node::Leaf(_), _) => ws.push(0.0),
            }
        }
        Self::new(tree, ws)
    }
}

/// Random spec on `n` leaves: merge two uniformly chosen clusters until one
/// remains, giving each merge the larger child weight plus a random increment.
pub fn generate_random(n: usize, rng: &mut RngStream, mode: WeightMode) -> Result<UltrametricSpec> {
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let mut builder = TreeBuilder::new();
    let mut weights = Vec::with_capacity(2 * n - 1);
    let mut active: Vec<(NodeId, f64)> = (0..n)
        .map(|i| {
            weights.push(0.0);
            (builder.leaf(i), 0.0)
        })
        .collect();
    while active.len() > 1 {
        let i = rng.index(active.len());
        let mut j = rng.index(active.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, wa) = active[i];
        let (b, wb) = active[j];
        let base = wa.max(wb);
        let tie = mode == WeightMode::WithTies && rng.index(4) == 0 && base > 0.0;
        let inc = if tie { 0.0 } else { 1.0 - rng.unit() };
        let w = base + inc;
        let id = builder.join(a, b);
        weights.push(w);
        active[i.min(j)] = (id, w);
        active.swap_remove(i.max(j));
    }
    let root = active[0].0;
    UltrametricSpec::new(builder.build(root)?, weights)
}

/// First `(x, y, z)` with `x < y` and `d(x, y) > max(d(x, z), d(y, z)) + tol`.
pub fn check_ultrametric(dist: &DistanceMatrix, tol: f64) -> Option<Triple> {
    let n = dist.len();
    for x in 0..n {
        for y in x + 1..n {
            let dxy = dist.get(x, y);
            for z in 0..n {
                if z != x && z != y && dxy > dist.get(x, z).max(dist.get(y, z)) + tol {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// Euclidean points whose pairwise distances equal the spec's ultrametric.
///
/// Each tree edge `P -> C` owns one axis; every leaf below `C` sits at
/// `sqrt((W(P)² - W(C)²) / 2)` on it. Two leaves differ exactly on the edges
/// below their common ancestor, and each side's squares telescope to
/// `W(lca)² / 2`.
pub fn embed_euclidean(spec: &UltrametricSpec) -> Result<PointSet> {
    let tree = &spec.tree;
    let n = tree.n_leaves();
    if n == 1 {
        return PointSet::from_flat(1, vec![0.0]);
    }
    let dim = 2 * (n - 1);
    let mut coords = vec![0.0; n * dim];
    let mut axis = 0;
    for id in tree.internal_nodes() {
        let (a, b) = tree.children(id).expect("internal node");
        for child in [a, b] {
            let (wp, wc) = (spec.weights[id], spec.weights[child]);
            let sq = (wp * wp - wc * wc) / 2.0;
            if sq < 0.0 {
                return Err(Error::NotMonotone { parent: wp, child: wc });
            }
            let v = sq.sqrt();
            for &leaf in tree.leaves_in_order(child) {
                coords[leaf * dim + axis] = v;
            }
            axis += 1;
        }
    }
    PointSet::from_flat(dim, coords)
}

fn equality_tol(dist: &DistanceMatrix) -> f64 {
    1e-9 * dist.max_entry()
}

/// Generating tree for an ultrametric, built top-down: take the first
/// farthest pair `(i, j)`, send to `j`'s side every point at that same
/// distance from `i`, keep the rest with `i`, and recurse.
pub fn build_generating_tree(dist: &DistanceMatrix) -> Result<HierTree> {
    let tol = equality_tol(dist);
    if let Some((x, y, z)) = check_ultrametric(dist, tol) {
        return Err(Error::NotUltrametric(x, y, z));
    }
    let mut builder = TreeBuilder::new();
    let all: Vec<usize> = (0..dist.len()).collect();
    let root = grow(dist, &all, tol, &mut builder);
    builder.build(root)
}

fn grow(dist: &DistanceMatrix, set: &[usize], tol: f64, builder: &mut TreeBuilder) -> NodeId {
    if let [only] = set {
        return builder.leaf(*only);
    }
    let max = set
        .iter()
        .enumerate()
        .flat_map(|(k, &x)| set[k + 1..].iter().map(move |&y| dist.get(x, y)))
        .fold(0.0, f64::max);
    let (i, j) = set
        .iter()
        .enumerate()
        .flat_map(|(k, &x)| set[k + 1..].iter().map(move |&y| (x, y)))
        .find(|&(x, y)| dist.get(x, y) >= max - tol)
        .expect("a set of two or more points has a farthest pair");
    let dij = dist.get(i, j);
    let (far, near): (Vec<usize>, Vec<usize>) =
        set.iter().partition(|&&x| x == j || (x != i && (dist.get(i, x) - dij).abs() <= tol));
    let a = grow(dist, &near, tol, builder);
    let b = grow(dist, &far, tol, builder);
    builder.join(a, b)
}

/// First split (in [`HierTree::splits`] order) with a cross distance that
/// differs from the largest distance inside its parent set by more than `tol`.
pub fn verify_generating_tree(dist: &DistanceMatrix, tree: &HierTree, tol: f64) -> Result<Option<Split>> {
    if tree.n_leaves() != dist.len() {
        return Err(Error::SizeMismatch { expected: dist.len(), found: tree.n_leaves() });
    }
    for split in tree.splits() {
        let p = &split.parent;
        let max = p
            .iter()
            .enumerate()
            .flat_map(|(k, &x)| p[k + 1..].iter().map(move |&y| dist.get(x, y)))
            .fold(0.0, f64::max);
        let bad = split
            .left
            .iter()
            .any(|&x| split.right.iter().any(|&y| (dist.get(x, y) - max).abs() > tol));
        if bad {
            return Ok(Some(split));
        }
    }
    Ok(None)
}

/// Recovers node weights from a generating tree: each internal node gets
/// the largest cross distance of its split.
pub fn recover_spec(dist: &DistanceMatrix, tree: &HierTree) -> Result<UltrametricSpec> {
    if tree.n_leaves() != dist.len() {
        return Err(Error::SizeMismatch { expected: dist.len(), found: tree.n_leaves() });
    }
    let mut weights = vec![0.0; tree.nodes().len()];
    for id in tree.internal_nodes() {
        let (a, b) = tree.children(id).expect("internal node");
        let right = tree.leaves_in_order(b);
        weights[id] = tree
            .leaves_in_order(a)
            .iter()
            .flat_map(|&x| right.iter().map(move |&y| dist.get(x, y)))
            .fold(0.0, f64::max);
    }
    UltrametricSpec::new(tree.clone(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_point() -> UltrametricSpec {
        "((0,1):1,(2,3):1):2".parse().unwrap()
    }

    #[test]
    fn check_examples() {
        assert!(check_ultrametric(&four_point().distances(), 0.0).is_none());
        let eq = DistanceMatrix::from_fn(3, |_, _| 1.0).unwrap();
        assert!(check_ultrametric(&eq, 0.0).is_none());
        let line = PointSet::from_line(&[0.0, 1.0, 5.0]).unwrap().pairwise_distances();
        assert_eq!(check_ultrametric(&line, 0.0), Some((0, 2, 1)));
    }

    #[test]
    fn text_round_trip() {
        let spec = four_point();
        assert_eq!(spec.to_string(), "((0,1):1,(2,3):1):2");
        let d = spec.distances();
        assert_eq!((d.get(0, 1), d.get(2, 3), d.get(0, 2), d.get(1, 3)), (1.0, 1.0, 2.0, 2.0));
        let back: UltrametricSpec = "((2,3):0.5,(1,0):1.5):2.25".parse().unwrap();
        assert_eq!(back.to_string(), "((0,1):1.5,(2,3):0.5):2.25");
    }

    #[test]
    fn text_errors() {
        assert!("((0,1):3,2):2".parse::<UltrametricSpec>().is_err());
        assert!("((0,1),2):2".parse::<UltrametricSpec>().is_err());
        assert!("((0,1):0,2):2".parse::<UltrametricSpec>().is_err());
        assert!("((0,1):x,2):2".parse::<UltrametricSpec>().is_err());
    }

    #[test]
    fn generated_specs() {
        let mut rng = RngStream::new(5);
        let one = generate_random(1, &mut rng, WeightMode::Strict).unwrap();
        assert_eq!(one.n_leaves(), 1);
        let two = generate_random(2, &mut rng, WeightMode::Strict).unwrap();
        assert!(two.weight(two.tree().root()) > 0.0);
        for n in [3, 8, 20] {
            for mode in [WeightMode::Strict, WeightMode::WithTies] {
                let spec = generate_random(n, &mut rng, mode).unwrap();
                assert_eq!(spec.n_leaves(), n);
                let tol = if mode == WeightMode::Strict { 0.0 } else { 1e-12 };
                assert!(check_ultrametric(&spec.distances(), tol).is_none());
            }
        }
        assert!(generate_random(0, &mut rng, WeightMode::Strict).is_err());
    }

    #[test]
    fn embedding_two_points() {
        let spec: UltrametricSpec = "(0,1):3".parse().unwrap();
        let p = embed_euclidean(&spec).unwrap();
        assert_eq!(p.dim(), 2);
        assert!((p.distance(0, 1).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_four_points() {
        let p = embed_euclidean(&four_point()).unwrap();
        assert_eq!(p.dim(), 6);
        let root_edge = 1.5f64.sqrt();
        let leaf_edge = 0.5f64.sqrt();
        let mut a = p.point(0).to_vec();
        a.sort_by(f64::total_cmp);
        assert_eq!(a, vec![0.0, 0.0, 0.0, 0.0, leaf_edge, root_edge]);
        assert!((p.distance(0, 2).unwrap() - 2.0).abs() < 1e-12);
        assert!((p.distance(0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((p.distance(2, 3).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generating_tree_examples() {
        let two = DistanceMatrix::from_fn(2, |_, _| 1.0).unwrap();
        assert_eq!(build_generating_tree(&two).unwrap().to_string(), "(0,1)");
        assert_eq!(verify_generating_tree(&two, &"(0,1)".parse().unwrap(), 0.0).unwrap(), None);

        let d = four_point().distances();
        let tree = build_generating_tree(&d).unwrap();
        assert_eq!(tree.to_string(), "((0,1),(2,3))");
        assert_eq!(verify_generating_tree(&d, &tree, 1e-12).unwrap(), None);
        let bad: HierTree = "((0,2),(1,3))".parse().unwrap();
        let split = verify_generating_tree(&d, &bad, 1e-12).unwrap().unwrap();
        assert_eq!(split.parent, vec![0, 1, 2, 3]);

        let eq = DistanceMatrix::from_fn(3, |_, _| 1.0).unwrap();
        let tree = build_generating_tree(&eq).unwrap();
        assert_eq!(tree.splits()[0], Split::new(vec![0], vec![1, 2]).unwrap());

        let line = PointSet::from_line(&[0.0, 1.0, 5.0]).unwrap().pairwise_distances();
        assert!(matches!(build_generating_tree(&line), Err(Error::NotUltrametric(0, 2, 1))));
    }

    #[test]
    fn recovered_weights_match_spec() {
        let spec = four_point();
        let d = spec.distances();
        let rec = recover_spec(&d, &build_generating_tree(&d).unwrap()).unwrap();
        assert_eq!(rec.to_string(), spec.to_string());
    }
}
