//! Random-cluster and Erdős–Rényi heat-bath samplers, the three monotone couplings,
//! the red/green split and the yellow/blue colouring bounds.
//!
//! All probabilities are exact rationals. A Bernoulli draw compares a lazily expanded
//! uniform against the rational threshold, so coupled chains that share one uniform
//! are coupled exactly.

mod bicolour;
mod chain;
mod dynamic;
mod probability;
mod split;

pub use bicolour::{bicolour_bounds, no_bicolour_probability, simulate_bicolour};
pub use chain::{
    heat_bath_step, run_coupled, sample_rc, sample_traced, verify_containment, ChainState,
    Conditioning, CoupledChain, CoupledState, CouplingKind, HeatBath, Model, StateSummary,
};
pub use probability::{bernoulli, EdgeProbabilityMap};
pub use split::{
    factorisation_check, rc_distribution, rc_weight, red_green_split,
    FactorisationReport, RedGreen,
};
