//! The gadget `Γ` / `Γ′`: two-clique construction, phase constants, the weight
//! recurrence and the `ρ` tuner.

mod dp;
mod phase;
mod spec;
mod tuner;

pub use dp::{dp_weights, z_k, DpTable, GadgetSummary, IntPoly};
pub use phase::{phase_constants, PhaseConstants};
pub use spec::{build_gadget, GadgetSpec};
pub use tuner::{
    psi_monotonicity, tune_rho, tune_rho_with, MonotonicityReport, RhoGrid, TuneResult,
    TunerConfig, ZetaCurve,
};
pub(crate) use tuner::ser_rat;
