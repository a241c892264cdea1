//! Hierarchical clustering under the Hierarchical-Revenue objective.
//!
//! The crate evaluates three tree objectives (revenue, CKMM and Dasgupta),
//! builds trees with bisecting k-means, average/single linkage and a
//! coin-flip baseline, and generates ultrametric instances with known
//! optimal trees. Small instances can be solved exactly by enumerating
//! every binary tree, which is what most of the property tests lean on.

pub mod algorithm;
pub mod cli;
pub mod error;
pub mod harness;
pub mod metric;
pub mod objective;
pub mod rng;
pub mod tree;
pub mod ultrametric;

pub use error::{Error, Result};
pub use metric::{DistanceMatrix, KMeansSolution, PointSet};
pub use objective::{ObjectiveKind, ObjectiveReport};
pub use rng::RngStream;
pub use tree::{HierTree, Split};
pub use ultrametric::UltrametricSpec;
