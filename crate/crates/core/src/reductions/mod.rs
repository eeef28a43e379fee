//! The chain of reductions from counting maximum independent sets in bipartite graphs
//! down to the uniform-weight Tutte polynomial, and the 3-uniform Ising reduction.

mod bis;
mod hyper;
mod ising;
mod pipeline;
mod series_parallel;

pub use bis::{
    blowup, maxis_blowup, pad_sandwich_holds, psi_weight, semiregular_pad, semiregular_to_hypertutte,
    MaxIsBlowup, PadParams, SemiregularPad,
};
pub use hyper::{
    choose_eta, decomposition_check, gadget_partition_weights, hyper_to_twoweight, prescribed_clique_size,
    simulate_hyperedges, TwoWeightConfig, TwoWeightInstance,
};
pub use ising::{ising3_reduce, IsingReduction};
pub use pipeline::{run_pipeline, PipelineConfig, PipelineResult, ReductionTrace, TraceRecord};
pub use series_parallel::{
    expanded_value, implement_weight, parallel_compose, series_compose, twoweight_to_uniform,
    Composition, UniformInstance, WeightImplementation,
};
