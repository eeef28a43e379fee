//! Exact and sampled partition functions for the ferromagnetic Potts / random-cluster
//! model, the two-clique hyperedge gadget, and the chain of approximation-preserving
//! reductions from bipartite independent-set counting down to the uniform-weight
//! Tutte polynomial.
//!
//! Module map:
//!
//! * [`model`] graphs, hypergraphs, partitions, exact numbers and the text format.
//! * [`exact_eval`] brute-force and frontier oracles for `Z_Tutte` and `Z_Potts`.
//! * [`random_cluster`] heat-bath chains, monotone couplings and the red/green split.
//! * [`gadget`] the gadget, its phase constants, the weight dynamic program and the
//!   critical-probability tuner.
//! * [`reductions`] every stage of the reduction pipeline plus the 3-uniform Ising map.

pub mod error;
pub mod exact_eval;
pub mod gadget;
pub mod model;
pub mod random_cluster;
pub mod reductions;

pub use error::{Error, Result};
pub use model::{
    BigRational, BipartiteGraph, Partition, Seed, WeightedGraph, WeightedHypergraph,
};
