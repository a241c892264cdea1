//! Tree-building algorithms.

mod linkage;
mod random;
mod two_means;

use std::fmt;
use std::str::FromStr;

pub use linkage::{agglomerate, average_linkage, single_linkage, Linkage};
pub use random::random_tree;
pub use two_means::{bisecting_kmeans, two_means, SolverKind, TwoMeansConfig, TwoMeansResult};

use crate::error::{Error, Result};
use crate::metric::PointSet;
use crate::rng::RngStream;
use crate::tree::HierTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    BisectingKMeans,
    AverageLinkage,
    SingleLinkage,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Self::BisectingKMeans, Self::AverageLinkage, Self::SingleLinkage, Self::Random];

    /// Short name used on the command line.
    pub fn flag(self) -> &'static str {
        match self {
            Self::BisectingKMeans => "bkm",
            Self::AverageLinkage => "avg",
            Self::SingleLinkage => "single",
            Self::Random => "random",
        }
    }

    /// Name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Self::BisectingKMeans => "bisecting-kmeans",
            Self::AverageLinkage => "average-linkage",
            Self::SingleLinkage => "single-linkage",
            Self::Random => "random",
        }
    }

    /// Builds a tree over `points`. The 2-means solver only matters for
    /// bisecting k-means, `rng` only for the random baseline.
    pub fn build(self, points: &PointSet, solver: &TwoMeansConfig, rng: &mut RngStream) -> Result<HierTree> {
        Ok(match self {
            Self::BisectingKMeans => bisecting_kmeans(points, solver)?,
            Self::AverageLinkage => average_linkage(&points.pairwise_distances()),
            Self::SingleLinkage => single_linkage(&points.pairwise_distances()),
            Self::Random => random_tree(points.len(), rng),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.flag() == s || a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{s}'")))
    }
}
