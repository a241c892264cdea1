//! The coin-flip baseline.

use crate::rng::RngStream;
use crate::tree::{HierTree, NodeId, TreeBuilder};

/// Top-down tree where every point of a node picks its side by a fair coin.
///
/// A flip that leaves one side empty is discarded and the whole node is
/// re-flipped, which samples the coin process conditioned on a proper split.
pub fn random_tree(n: usize, rng: &mut RngStream) -> HierTree {
    assert!(n >= 1, "random_tree needs at least one point");
    let mut builder = TreeBuilder::new();
    let all: Vec<usize> = (0..n).collect();
    let root = split(&all, rng, &mut builder);
    builder.build(root).expect("coin splits yield a valid tree")
}

fn split(set: &[usize], rng: &mut RngStream, builder: &mut TreeBuilder) -> NodeId {
    if let [only] = set {
        return builder.leaf(*only);
    }
    let (heads, tails) = loop {
        let (h, t): (Vec<usize>, Vec<usize>) = set.iter().partition(|_| rng.coin());
        if !h.is_empty() && !t.is_empty() {
            break (h, t);
        }
    };
    let a = split(&heads, rng, builder);
    let b = split(&tails, rng, builder);
    builder.join(a, b)
}
