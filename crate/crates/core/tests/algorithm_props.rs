mod common;

use hierrev::algorithm::{
    average_linkage, bisecting_kmeans, random_tree, single_linkage, two_means, Algorithm, TwoMeansConfig,
};
use hierrev::tree::TreeBuilder;
use hierrev::{DistanceMatrix, HierTree, PointSet, RngStream};
use proptest::prelude::*;

use common::{clumpy_points, uniform_points};

/// Cheapest bipartition found by scoring every mask from scratch.
fn brute_two_means(points: &PointSet) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for mask in 1..(1u32 << (n - 1)) {
        let (a, b): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| mask & (1 << i) == 0);
        best = best.min(points.kmeans_cost(&[a, b]).unwrap());
    }
    best
}

/// Cubic agglomeration that recomputes every linkage value from scratch.
fn naive_linkage(d: &DistanceMatrix, single: bool) -> HierTree {
    let n = d.len();
    let mut b = TreeBuilder::new();
    let mut clusters: Vec<(Vec<usize>, _)> = (0..n).map(|i| (vec![i], b.leaf(i))).collect();
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for x in 0..clusters.len() {
            for y in x + 1..clusters.len() {
                let cross = clusters[x].0.iter().flat_map(|&i| clusters[y].0.iter().map(move |&j| d.get(i, j)));
                let v = if single {
                    cross.fold(f64::INFINITY, f64::min)
                } else {
                    cross.sum::<f64>() / (clusters[x].0.len() * clusters[y].0.len()) as f64
                };
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, x, y));
                }
            }
        }
        // clusters stay sorted by smallest member, so (x, y) order is the id order
        let (_, x, y) = best.unwrap();
        let (members, node) = clusters.remove(y);
        let joined = b.join(clusters[x].1, node);
        clusters[x].0.extend(members);
        clusters[x].1 = joined;
    }
    b.build(clusters[0].1).unwrap()
}

proptest! {
    #[test]
    fn exhaustive_two_means_is_optimal(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let n = 2 + rng.index(9);
        let dim = 1 + rng.index(3);
        let points = uniform_points(&mut rng, n, dim);
        let all: Vec<usize> = (0..n).collect();
        let res = two_means(&points, &all, &TwoMeansConfig::exhaustive()).unwrap();
        let brute = brute_two_means(&points);
        prop_assert!((res.cost - brute).abs() <= 1e-9 * brute.max(1.0));
        let cost = points.kmeans_cost(&[res.split.left.clone(), res.split.right.clone()]).unwrap();
        prop_assert!((cost - res.cost).abs() <= 1e-9 * cost.max(1.0));
        prop_assert!(res.split.left.contains(&0));
    }

    #[test]
    fn lloyd_never_beats_the_exact_optimum(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let n = 2 + rng.index(11);
        let points = clumpy_points(&mut rng, n, 2);
        let all: Vec<usize> = (0..n).collect();
        let exact = two_means(&points, &all, &TwoMeansConfig::exhaustive()).unwrap().cost;
        let lloyd = two_means(&points, &all, &TwoMeansConfig::lloyd(seed)).unwrap();
        prop_assert!(lloyd.cost >= exact - 1e-9);
        prop_assert!(!lloyd.split.left.is_empty() && !lloyd.split.right.is_empty());
    }

    #[test]
    fn linkage_matches_naive_agglomeration(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let n = 1 + rng.index(25);
        let points = uniform_points(&mut rng, n, 2);
        let d = points.pairwise_distances();
        prop_assert_eq!(average_linkage(&d), naive_linkage(&d, false));
        prop_assert_eq!(single_linkage(&d), naive_linkage(&d, true));
    }
}

#[test]
fn linkage_ties_match_naive_agglomeration() {
    // integer grid points produce many exactly tied distances
    let mut rng = RngStream::new(9);
    for _ in 0..50 {
        let n = 2 + rng.index(12);
        let xs: Vec<f64> = (0..n).map(|_| rng.index(6) as f64).collect();
        let d = PointSet::from_line(&xs).unwrap().pairwise_distances();
        assert_eq!(single_linkage(&d), naive_linkage(&d, true), "{xs:?}");
    }
}

#[test]
fn every_algorithm_builds_a_valid_tree() {
    let mut rng = RngStream::new(1);
    for n in [1, 2, 3, 7, 25, 64, 200] {
        let points = clumpy_points(&mut rng, n, 3);
        for algo in Algorithm::ALL {
            let tree = algo.build(&points, &TwoMeansConfig::lloyd(3), &mut rng.substream(n as u64)).unwrap();
            assert_eq!(tree.n_leaves(), n, "{algo:?}");
            assert_eq!(tree.leaves(tree.root()), (0..n).collect::<Vec<_>>());
            assert_eq!(tree.internal_nodes().len(), n - 1);
        }
    }
}

#[test]
fn builds_are_deterministic() {
    let mut rng = RngStream::new(2);
    let points = uniform_points(&mut rng, 60, 3);
    for algo in Algorithm::ALL {
        let a = algo.build(&points, &TwoMeansConfig::lloyd(5), &mut RngStream::new(8)).unwrap();
        let b = algo.build(&points, &TwoMeansConfig::lloyd(5), &mut RngStream::new(8)).unwrap();
        assert_eq!(a.to_string(), b.to_string(), "{algo:?}");
    }
    assert_eq!(random_tree(30, &mut RngStream::new(4)), random_tree(30, &mut RngStream::new(4)));
}

#[test]
fn bisecting_kmeans_separates_far_groups_first() {
    let points = PointSet::from_line(&[0.0, 0.2, 0.1, 50.0, 50.3]).unwrap();
    let tree = bisecting_kmeans(&points, &TwoMeansConfig::exhaustive()).unwrap();
    let root = tree.split_at(tree.root()).unwrap();
    assert_eq!((root.left, root.right), (vec![0, 1, 2], vec![3, 4]));
}
