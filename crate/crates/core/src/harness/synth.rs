use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::metric::PointSet;
use crate::rng::RngStream;
use crate::tree::{HierTree, NodeId, TreeBuilder};

/// Parameters of [`synth_gaussian_mixture`].
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    pub k: usize,
    pub n: usize,
    pub dim: usize,
    pub separation: f64,
    pub seed: u64,
}

impl MixtureSpec {
    pub fn generate(&self) -> Result<PointSet> {
        synth_gaussian_mixture(self.k, self.n, self.dim, self.separation, &mut RngStream::new(self.seed))
    }
}

/// `n` points from `k` unit-variance spherical Gaussians, point `i` drawn
/// from cluster `i mod k`.
///
/// With `k <= dim` the centers sit on scaled coordinate axes, all pairwise
/// exactly `separation` apart; otherwise they are spaced `separation` apart
/// along the first axis.
pub fn synth_gaussian_mixture(k: usize, n: usize, dim: usize, separation: f64, rng: &mut RngStream) -> Result<PointSet> {
    if k == 0 || n == 0 || dim == 0 {
        return Err(Error::Config("mixture needs k, n and dim of at least 1".into()));
    }
    if !(separation.is_finite() && separation >= 0.0) {
        return Err(Error::Config(format!("invalid separation {separation}")));
    }
    let center = |c: usize, axis: usize| -> f64 {
        if k <= dim {
            if axis == c { separation / std::f64::consts::SQRT_2 } else { 0.0 }
        } else if axis == 0 {
            c as f64 * separation
        } else {
            0.0
        }
    };
    let mut coords = Vec::with_capacity(n * dim);
    for i in 0..n {
        let c = i % k;
        for axis in 0..dim {
            let z: f64 = StandardNormal.sample(rng);
            coords.push(center(c, axis) + z);
        }
    }
    PointSet::from_flat(dim, coords)
}

/// The coincident two-cluster instance on which the coin-flip baseline does badly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomBadInstanceSpec {
    pub n: usize,
    pub inter_cluster_distance: f64,
}

impl RandomBadInstanceSpec {
    pub fn new(n: usize) -> Self {
        Self { n, inter_cluster_distance: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.n * self.n + self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `n²` points at the origin (indices `0..n²`) followed by `n` points at
/// distance `D` along the first axis.
pub fn build_random_bad_instance(spec: &RandomBadInstanceSpec) -> Result<PointSet> {
    if spec.n < 2 {
        return Err(Error::Config(format!("instance needs n >= 2, got {}", spec.n)));
    }
    let d = spec.inter_cluster_distance;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Config(format!("inter-cluster distance must be positive, got {d}")));
    }
    let big = spec.n * spec.n;
    let xs: Vec<f64> = (0..spec.len()).map(|i| if i < big { 0.0 } else { d }).collect();
    PointSet::from_line(&xs)
}

/// Tree that separates the two clusters at the root and then peels points
/// off one at a time. Every pair earns a full unit on the instance.
pub fn clean_first_tree(spec: &RandomBadInstanceSpec) -> Result<HierTree> {
    let big = spec.n * spec.n;
    let mut b = TreeBuilder::new();
    let chain = |range: std::ops::Range<usize>, b: &mut TreeBuilder| -> NodeId {
        let mut it = range.map(|i| b.leaf(i)).collect::<Vec<_>>().into_iter();
        let first = it.next().expect("nonempty cluster");
        it.fold(first, |acc, leaf| b.join(acc, leaf))
    };
    let a = chain(0..big, &mut b);
    let c = chain(big..spec.len(), &mut b);
    let root = b.join(a, c);
    b.build(root)
}
