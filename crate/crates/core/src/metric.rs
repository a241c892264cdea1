//! Euclidean point sets, distance matrices and k-means cost primitives.

use crate::error::{Error, Result};

/// Relative tolerance used for floating-point comparisons across the crate.
pub const REL_TOL: f64 = 1e-9;
/// Absolute floor paired with [`REL_TOL`], since distances can be exactly zero.
pub const ABS_TOL: f64 = 1e-12;

/// `true` when `a` and `b` agree within [`REL_TOL`] relative, [`ABS_TOL`] absolute.
pub fn approx_eq(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= (REL_TOL * scale).max(ABS_TOL)
}

/// Points in `dim`-dimensional Euclidean space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptySet)?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::Invalid("points must have at least one coordinate".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Invalid(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Builds a point set from a row-major coordinate buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        if coords.is_empty() {
            return Err(Error::EmptySet);
        }
        if coords.len() % dim != 0 {
            return Err(Error::Invalid(format!(
                "{} coordinates do not divide into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Invalid(format!(
                "non-finite coordinate in point {}",
                bad / dim
            )));
        }
        Ok(Self { dim, coords })
    }

    /// One-dimensional point set, handy for line instances.
    pub fn from_line(xs: &[f64]) -> Result<Self> {
        Self::from_flat(1, xs.to_vec())
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.len() })
        }
    }

    /// Euclidean distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.dist(i, j))
    }

    /// Unchecked variant of [`PointSet::distance`] for hot loops.
    pub(crate) fn dist(&self, i: usize, j: usize) -> f64 {
        sq_dist(self.point(i), self.point(j)).sqrt()
    }

    /// Coordinate-wise mean of the points in `set`.
    pub fn centroid(&self, set: &[usize]) -> Result<Vec<f64>> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        for &i in set {
            self.check_index(i)?;
        }
        Ok(self.centroid_unchecked(set))
    }

    /// Accumulates offsets from the first point, so a set of coincident
    /// points has that point as its exact centroid.
    pub(crate) fn centroid_unchecked(&self, set: &[usize]) -> Vec<f64> {
        let base = self.point(set[0]);
        let mut c = vec![0.0; self.dim];
        for &i in &set[1..] {
            for ((acc, x), b) in c.iter_mut().zip(self.point(i)).zip(base) {
                *acc += x - b;
            }
        }
        let inv = 1.0 / set.len() as f64;
        c.iter_mut().zip(base).for_each(|(x, b)| *x = b + *x * inv);
        c
    }

    /// 1-means cost of `set`: squared distances to its centroid, summed.
    pub fn one_means_cost(&self, set: &[usize]) -> Result<f64> {
        let c = self.centroid(set)?;
        Ok(set.iter().map(|&i| sq_dist(self.point(i), &c)).sum())
    }

    /// k-means cost of a partition of `0..n`, each part scored against its own centroid.
    pub fn kmeans_cost(&self, parts: &[Vec<usize>]) -> Result<f64> {
        check_partition(parts, self.len())?;
        parts.iter().map(|p| self.one_means_cost(p)).sum()
    }

    pub fn pairwise_distances(&self) -> DistanceMatrix {
        let n = self.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = self.dist(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    /// Restriction to the points in `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<PointSet> {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            self.check_index(i)?;
            coords.extend_from_slice(self.point(i));
        }
        PointSet::from_flat(self.dim, coords)
    }

    /// Applies `f` to every coordinate, returning a new point set.
    pub fn map_coords(&self, f: impl Fn(usize, f64) -> f64) -> Result<PointSet> {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(k, &x)| f(k % self.dim, x))
            .collect();
        PointSet::from_flat(self.dim, coords)
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_partition(parts: &[Vec<usize>], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for (k, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::NotAPartition(format!("part {k} is empty")));
        }
        for &i in part {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::NotAPartition(format!("index {i} appears twice")));
            }
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::NotAPartition(format!("index {missing} is not covered")));
    }
    Ok(())
}

/// A k-means partition together with its cost.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansSolution {
    pub parts: Vec<Vec<usize>>,
    pub cost: f64,
}

impl KMeansSolution {
    /// Scores `parts` against `points`; fails unless `parts` partitions the point indices.
    pub fn new(points: &PointSet, parts: Vec<Vec<usize>>) -> Result<Self> {
        let cost = points.kmeans_cost(&parts)?;
        Ok(Self { parts, cost })
    }
}

/// Symmetric matrix of nonnegative pairwise dissimilarities (or similarity
/// weights, when fed to the Dasgupta cost) with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Ordered triple of point indices, reported by the triangle checks.
pub type Triple = (usize, usize, usize);

impl DistanceMatrix {
    /// Validates a row-major `n × n` buffer.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if data.len() != n * n {
            return Err(Error::SizeMismatch { expected: n * n, found: data.len() });
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::Invalid(format!("nonzero diagonal entry at {i}")));
            }
            for j in i + 1..n {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if !(a.is_finite() && a >= 0.0) {
                    return Err(Error::Invalid(format!("entry ({i}, {j}) = {a} is not a nonnegative number")));
                }
                if a != b {
                    return Err(Error::Invalid(format!("asymmetric entries at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Builds the matrix from `f(i, j)` evaluated on `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self::new(n, data)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Sum over unordered pairs.
    pub fn pair_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i)[i + 1..].iter().sum::<f64>())
            .sum()
    }

    /// First triple `(i, j, k)` in lexicographic order with
    /// `d(i, k) > d(i, j) + d(j, k) + tol`, or `None` if the triangle
    /// inequality holds everywhere.
    pub fn check_metric(&self, tol: f64) -> Option<Triple> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    if self.get(i, k) > self.get(i, j) + self.get(j, k) + tol {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn is_metric(&self, tol: f64) -> bool {
        self.check_metric(tol).is_none()
    }
}
