//! Combinatorial clustering toolkit.
//!
//! Proximity over quantitative, ordinal and multiset scales; quality
//! measures and comparison of clustering solutions; agglomerative, graph,
//! assignment-based clustering; and restructuring of a solution under a
//! change budget.
//!
//! Items are addressed by dense indices `0..n`. Data-parallel kernels take
//! an [`Exec`] mode; with the default `parallel` feature they can fan out
//! over rayon, otherwise everything runs on the calling thread.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod model;
pub mod multiset;
pub mod proximity;
pub mod quality;
pub mod compare;
pub mod agglomerative;
pub mod graph;
pub mod assignment;
pub mod restructuring;

pub use error::{Error, Result};
pub use exec::Exec;
pub use model::{
    validate_partition, Dataset, Edge, Hierarchy, ParamKind, Partition, PartitionCheck,
    ProximityMatrix, Ranking, SignedWeightedGraph, WeightedGraph,
};
pub use multiset::MultisetEstimate;
