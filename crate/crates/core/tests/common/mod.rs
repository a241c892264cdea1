#![allow(dead_code)]

use hierrev::algorithm::random_tree;
use hierrev::{HierTree, PointSet, RngStream};

/// `n` points uniform in the unit cube of dimension `dim`.
pub fn uniform_points(rng: &mut RngStream, n: usize, dim: usize) -> PointSet {
    let coords = (0..n * dim).map(|_| rng.unit()).collect();
    PointSet::from_flat(dim, coords).unwrap()
}

/// Points drawn around a few random centers, with some exact duplicates.
pub fn clumpy_points(rng: &mut RngStream, n: usize, dim: usize) -> PointSet {
    let centers: Vec<Vec<f64>> = (0..3).map(|_| (0..dim).map(|_| 10.0 * rng.unit()).collect()).collect();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 && rng.index(5) == 0 {
            let j = rng.index(i);
            pts.push(pts[j].clone());
            continue;
        }
        let c = &centers[rng.index(3)];
        pts.push(c.iter().map(|x| x + rng.unit() - 0.5).collect());
    }
    PointSet::new(pts).unwrap()
}

pub fn random_trees(rng: &mut RngStream, n: usize, count: usize) -> Vec<HierTree> {
    (0..count).map(|_| random_tree(n, rng)).collect()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() <= 1e-12
}
