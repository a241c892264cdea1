mod common;

use std::collections::HashSet;

use hierrev::algorithm::random_tree;
use hierrev::tree::{enumerate_trees, tree_count};
use hierrev::{HierTree, RngStream};
use proptest::prelude::*;

proptest! {
    #[test]
    fn serialization_round_trips(n in 1usize..40, seed in any::<u64>()) {
        let tree = random_tree(n, &mut RngStream::new(seed));
        let text = tree.to_string();
        let back: HierTree = text.parse().unwrap();
        prop_assert_eq!(&back, &tree);
        prop_assert_eq!(back.to_string(), text);
        prop_assert_eq!(back.canonical(), tree.canonical());
    }

    #[test]
    fn lca_contains_both_leaves(n in 2usize..30, seed in any::<u64>()) {
        let tree = random_tree(n, &mut RngStream::new(seed));
        for i in 0..n {
            for j in i + 1..n {
                let a = tree.lca(i, j);
                let leaves = tree.leaves(a);
                prop_assert!(leaves.contains(&i) && leaves.contains(&j));
                let (l, r) = tree.children(a).unwrap();
                let in_l = tree.leaves(l);
                prop_assert!(in_l.contains(&i) != in_l.contains(&j));
                prop_assert!(tree.leaves(r).contains(&i) != tree.leaves(r).contains(&j));
                prop_assert_eq!(tree.lca_leaf_count(i, j).unwrap(), leaves.len());
            }
        }
    }
}

#[test]
fn every_pair_is_separated_by_exactly_one_split() {
    let mut rng = RngStream::new(50);
    for _ in 0..100 {
        let tree = random_tree(50, &mut rng);
        let mut seen = vec![0u32; 50 * 50];
        let splits = tree.splits();
        assert_eq!(splits.len(), 49);
        for s in &splits {
            for &i in &s.left {
                for &j in &s.right {
                    seen[i.min(j) * 50 + i.max(j)] += 1;
                }
            }
        }
        for i in 0..50 {
            for j in i + 1..50 {
                assert_eq!(seen[i * 50 + j], 1, "pair ({i}, {j}) in {tree}");
            }
        }
        let covered: usize = splits.iter().map(|s| s.cross_pairs()).sum();
        assert_eq!(covered, 50 * 49 / 2);
    }
}

#[test]
fn enumeration_is_complete_and_distinct() {
    for n in 2..=7 {
        let trees: Vec<HierTree> = enumerate_trees(n).unwrap().collect();
        assert_eq!(trees.len() as u64, tree_count(n));
        let distinct: HashSet<String> = trees.iter().map(|t| t.canonical()).collect();
        assert_eq!(distinct.len(), trees.len(), "n={n}");
        for t in &trees {
            assert_eq!(t.n_leaves(), n);
        }
    }
    assert!(enumerate_trees(1).is_err());
    assert!(enumerate_trees(8).is_err());
}

#[test]
fn child_order_does_not_matter() {
    let a: HierTree = "((0,1),(2,3))".parse().unwrap();
    let b: HierTree = "((3,2),(1,0))".parse().unwrap();
    assert_eq!(a, b);
    assert_eq!(b.to_string(), "((0,1),(2,3))");
}
