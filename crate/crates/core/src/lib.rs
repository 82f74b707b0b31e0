//! Exact k-means clustering accelerated by dual-tree traversal.
//!
//! A space tree is built once over the data points and a second tree is
//! built over the centroids at every iteration. A depth-first dual traversal
//! of the two trees rules out many centroids for many points at once, while
//! bounds carried between iterations let whole subtrees skip the traversal
//! entirely. Every iteration assigns points exactly as a brute-force Lloyd
//! iteration would.
//!
//! Baselines ([`baselines`]) provide naive Lloyd, Hamerly and Elkan with the
//! same tie-breaking and empty-cluster behaviour, and [`harness`] holds the
//! instrumentation used to compare them.

pub mod baselines;
pub mod dualtree;
mod error;
pub mod harness;
pub mod io;
pub mod kmeans;
pub mod metric;
pub mod par;
pub mod tree;

pub use error::{Error, Result};
pub use kmeans::{Algorithm, ClusteringConfig, ClusteringResult, KMeansStep, TieBreak};
pub use metric::{BoundingRegion, CentroidSet, Dataset, DistanceCounter};
pub use par::Execution;
