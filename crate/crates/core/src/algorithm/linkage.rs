//! Agglomerative average- and single-linkage over a distance matrix.
//!
//! Clusters are identified by their smallest leaf. Each step merges the
//! pair with the smallest linkage value; ties go to the lexicographically
//! smallest `(id, id)` pair. Every active cluster caches its best partner
//! among active clusters with a larger id, so a step costs `O(n)` unless a
//! cache entry has to be rebuilt.

use crate::metric::DistanceMatrix;
use crate::tree::{HierTree, NodeId, TreeBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Linkage {
    /// Mean pairwise distance between the two clusters.
    Average,
    /// Smallest pairwise distance between the two clusters.
    Single,
}

struct State {
    n: usize,
    linkage: Linkage,
    /// Sum (average) or minimum (single) of cross distances, indexed by cluster id.
    agg: Vec<f64>,
    size: Vec<usize>,
    active: Vec<bool>,
    /// Best `(value, partner)` with partner > id.
    best: Vec<Option<(f64, usize)>>,
}

impl State {
    fn value(&self, a: usize, b: usize) -> f64 {
        let v = self.agg[a * self.n + b];
        match self.linkage {
            Linkage::Average => v / (self.size[a] * self.size[b]) as f64,
            Linkage::Single => v,
        }
    }

    fn rescan(&mut self, a: usize) {
        let mut best: Option<(f64, usize)> = None;
        for b in a + 1..self.n {
            if self.active[b] {
                let v = self.value(a, b);
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, b));
                }
            }
        }
        self.best[a] = best;
    }
}

pub fn agglomerate(dist: &DistanceMatrix, linkage: Linkage) -> HierTree {
    let n = dist.len();
    let mut builder = TreeBuilder::new();
    let mut node: Vec<NodeId> = (0..n).map(|i| builder.leaf(i)).collect();
    if n == 1 {
        return builder.build(node[0]).expect("single leaf");
    }
    let mut agg = vec![0.0; n * n];
    for i in 0..n {
        agg[i * n..(i + 1) * n].copy_from_slice(dist.row(i));
    }
    let mut st = State {
        n,
        linkage,
        agg,
        size: vec![1; n],
        active: vec![true; n],
        best: vec![None; n],
    };
    for a in 0..n {
        st.rescan(a);
    }

    let mut root = node[0];
    for _ in 1..n {
        let (a, (_, b)) = (0..n)
            .filter(|&i| st.active[i])
            .filter_map(|i| st.best[i].map(|e| (i, e)))
            .min_by(|(i, (vi, _)), (j, (vj, _))| vi.total_cmp(vj).then(i.cmp(j)))
            .expect("two active clusters remain");

        root = builder.join(node[a], node[b]);
        node[a] = root;
        st.active[b] = false;
        st.best[b] = None;
        for k in 0..n {
            if !st.active[k] || k == a {
                continue;
            }
            let (ak, bk) = (st.agg[a * n + k], st.agg[b * n + k]);
            let merged = match linkage {
                Linkage::Average => ak + bk,
                Linkage::Single => ak.min(bk),
            };
            st.agg[a * n + k] = merged;
            st.agg[k * n + a] = merged;
        }
        st.size[a] += st.size[b];

        st.rescan(a);
        for i in 0..b {
            if !st.active[i] || i == a {
                continue;
            }
            match st.best[i] {
                Some((_, p)) if p == a || p == b => st.rescan(i),
                Some((v, p)) if i < a => {
                    let va = st.value(i, a);
                    if va < v || (va == v && a < p) {
                        st.best[i] = Some((va, a));
                    }
                }
                _ => {}
            }
        }
    }
    builder.build(root).expect("agglomeration yields a valid tree")
}

pub fn average_linkage(dist: &DistanceMatrix) -> HierTree {
    agglomerate(dist, Linkage::Average)
}

pub fn single_linkage(dist: &DistanceMatrix) -> HierTree {
    agglomerate(dist, Linkage::Single)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::PointSet;

    fn line(xs: &[f64]) -> DistanceMatrix {
        PointSet::from_line(xs).unwrap().pairwise_distances()
    }

    #[test]
    fn small_cases() {
        for f in [average_linkage, single_linkage] {
            assert_eq!(f(&line(&[3.0])).to_string(), "0");
            assert_eq!(f(&line(&[0.0, 1.0])).to_string(), "(0,1)");
            assert_eq!(f(&line(&[0.0, 1.0, 5.0])).to_string(), "((0,1),2)");
        }
    }

    #[test]
    fn single_linkage_uses_smallest_gap() {
        // gaps 1, 1.1, 0.9: (2,3) merge first, then 0-1, then the rest
        let tree = single_linkage(&line(&[0.0, 1.0, 2.1, 3.0]));
        assert_eq!(tree.to_string(), "((0,1),(2,3))");
        let tree = average_linkage(&line(&[0.0, 1.0, 2.1, 3.0]));
        assert_eq!(tree.to_string(), "((0,1),(2,3))");
    }

    #[test]
    fn linkages_differ() {
        // 1.2 is closer to {0, 0.5} by single linkage, to {2, 2.05} on average
        let d = line(&[0.0, 0.5, 1.2, 2.0, 2.05]);
        assert_eq!(single_linkage(&d).to_string(), "(((0,1),2),(3,4))");
        assert_eq!(average_linkage(&d).to_string(), "((0,1),(2,(3,4)))");
    }

    #[test]
    fn equal_gaps_merge_smallest_ids_first() {
        let d = line(&[0.0, 2.0, 3.0, 4.0]);
        assert_eq!(single_linkage(&d).to_string(), "(0,((1,2),3))");
    }

    #[test]
    fn ties_go_to_smallest_ids() {
        let d = line(&[0.0, 0.0, 0.0, 0.0]);
        assert_eq!(single_linkage(&d).to_string(), "(((0,1),2),3)");
        assert_eq!(average_linkage(&d).to_string(), "(((0,1),2),3)");
    }
}
