//! Shared instance types, exact numbers and seedable randomness.

mod components;
mod graph;
pub mod number;
mod partition;
mod seed;
pub mod text;
mod union_find;

pub use components::{connected_components, hyper_components};
pub use graph::{BipartiteGraph, WeightedGraph, WeightedHypergraph};
pub use num_rational::BigRational;
pub use partition::Partition;
pub use seed::Seed;
pub use union_find::RollbackUnionFind;
